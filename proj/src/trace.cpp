// Copyright 2026 The wmmf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmmf/trace.hpp"

#include <cstdio>
#include <sstream>

namespace wmmf {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string SolveTrace::to_csv() const {
  std::ostringstream out;
  out << "outer,inner,common_rate,power,mu,stationarity,constraint_violation,achieved,"
         "outer_achieved,best_achieved,min_stream_rate,degenerate,group_rates\n";
  std::size_t o = 0;
  for (const auto& rec : inner) {
    while (o < outer.size() && outer[o].outer < rec.outer) ++o;
    const OuterRecord* orec = o < outer.size() && outer[o].outer == rec.outer ? &outer[o] : nullptr;
    out << rec.outer << ',' << rec.inner << ',' << fmt(rec.common_rate) << ',' << fmt(rec.power)
        << ',' << fmt(rec.mu) << ',' << fmt(rec.stationarity) << ','
        << fmt(rec.constraint_violation) << ',' << fmt(rec.achieved) << ','
        << (orec ? fmt(orec->achieved) : "") << ',' << (orec ? fmt(orec->best_achieved) : "")
        << ',' << (orec ? fmt(orec->min_stream_rate) : "") << ',' << (rec.degenerate ? 1 : 0)
        << ',';
    for (std::size_t g = 0; g < rec.group_rates.size(); ++g)
      out << (g ? ";" : "") << fmt(rec.group_rates[g]);
    out << '\n';
  }
  return out.str();
}

}  // namespace wmmf
