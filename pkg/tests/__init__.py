# Tests package for ecrt-stream
