#include <doctest.h>

TEST_SUITE("tensor") {}
