#pragma once

#include <functional>

#include "facmon/auth.hpp"
#include "facmon/date.hpp"
#include "facmon/lifecycle.hpp"
#include "facmon/monitoring.hpp"
#include "facmon/registry.hpp"
#include "facmon/reporting.hpp"
#include "facmon/storage.hpp"

namespace facmon {

/// The domain services over one open store.
struct Services {
  explicit Services(Store& s, AuthOptions auth_options = {})
      : store(s),
        registry(s),
        lifecycle(s),
        monitoring(s),
        reporting(s),
        auth(s, auth_options),
        today([&s] { return Date::from(s.now()); }) {}

  Store& store;
  Registry registry;
  Lifecycle lifecycle;
  Monitoring monitoring;
  Reporting reporting;
  Auth auth;
  /// Default for omitted dates; follows the store clock.
  std::function<Date()> today;
};

}  // namespace facmon
