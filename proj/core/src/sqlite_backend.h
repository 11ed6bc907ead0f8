#pragma once

#include <memory>

#include "olxp/driver.h"

namespace olxp::sqlite {

// Opens target.pool_size connections on the embedded database file.
std::shared_ptr<Pool> Connect(const BackendTarget& target, const Descriptor& descriptor);

}  // namespace olxp::sqlite
