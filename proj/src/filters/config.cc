/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>

#include "enff/core/errors.hpp"
#include "enff/filters/filters.hpp"

namespace enff {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void FilterConfig::validate() const {
  if (N < 1) throw ConfigError("ensemble size must be at least 1");
  std::visit(Overloaded{
                 [&](const EnFFParams& p) {
                   if (T < 1) throw ConfigError("EnFF needs T >= 1");
                   p.flow.validate();
                   p.guidance.validate();
                 },
                 [&](const EnSFParams& p) {
                   if (T < 1) throw ConfigError("EnSF needs T >= 1");
                   auto ok = [](double e) { return std::isfinite(e) && e > 0.0 && e <= 1.0; };
                   if (!ok(p.eps_alpha) || !ok(p.eps_beta))
                     throw ConfigError("EnSF eps_alpha and eps_beta must lie in (0, 1]");
                 },
                 [&](const BPFParams&) {},
                 [&](const EnKFParams&) {
                   if (N < 2) throw ConfigError("EnKF-PO needs at least two members");
                 },
             },
             algorithm);
}

std::string FilterConfig::name() const {
  return std::visit(Overloaded{
                        [](const EnFFParams&) { return std::string("enff"); },
                        [](const EnSFParams&) { return std::string("ensf"); },
                        [](const BPFParams&) { return std::string("bpf"); },
                        [](const EnKFParams&) { return std::string("enkf"); },
                    },
                    algorithm);
}

}  // namespace enff
