#include "qbattery/common.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace qbattery {

int max_dense_sites()
{
  const char* env = std::getenv("QBATTERY_MAX_N");
  if (env == nullptr) return default_max_sites;
  int value = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc{} || ptr != end || value <= 0) return default_max_sites;
  return value;
}

void check_dense_sites(int sites)
{
  const int cap = max_dense_sites();
  if (sites > cap) {
    throw GuardError("dense operator on " + std::to_string(sites) +
                     " sites exceeds the memory guard of " + std::to_string(cap) +
                     " sites (set QBATTERY_MAX_N to override)");
  }
}

} // namespace qbattery
