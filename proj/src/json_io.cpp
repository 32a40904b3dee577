#include <timps/json_io.hpp>
