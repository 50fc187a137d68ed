// Catch2 v3 amalgamated implementation, compiled once and linked into every
// unit-test binary. The default main lives here.
#include <catch2/catch_amalgamated.cpp>
