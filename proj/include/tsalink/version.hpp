/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

namespace tsalink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tsalink
