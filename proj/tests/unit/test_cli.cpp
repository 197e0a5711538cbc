#include <doctest.h>
// CLI pipeline tests are added alongside the tool.
