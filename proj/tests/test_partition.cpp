#include <doctest.h>

TEST_SUITE("partition") {}
