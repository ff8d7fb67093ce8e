#pragma once

#include <string>

#include "doctest.h"
#include "ncmetric/error.hpp"
#include "ncmetric/props.hpp"

// Every catalog entry under `prefix` must pass for a few seeds.
inline void require_properties(const std::string& prefix) {
  for (std::uint64_t seed : {7u, 11u, 2024u}) {
    const auto results = ncm::run_properties(seed, prefix);
    REQUIRE_FALSE(results.empty());
    for (const auto& r : results) {
      INFO(r.module << "/" << r.name << " seed " << seed << " value " << r.value << " threshold " << r.threshold
                    << " " << r.note);
      CHECK(r.pass);
    }
  }
}

template <class F>
ncm::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const ncm::NcError& e) {
    return e.kind();
  }
  FAIL("expected an NcError");
  return ncm::ErrorKind::InvalidSpec;
}
