#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "scalesep/errors.hpp"

namespace scalesep {

// Deterministic CSV output: doubles are printed with %.17g so reruns with
// the same seed produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw InvalidArgument("csv: cannot write " + path);
    out_ << header << "\n";
  }

  void field(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    sep();
    out_ << buf;
  }
  void field(int v) {
    sep();
    out_ << v;
  }
  void field(const std::string& v) {
    sep();
    out_ << v;
  }
  void end_row() {
    out_ << "\n";
    first_ = true;
  }

  template <class... Args>
  void row(Args... args) {
    (field(args), ...);
    end_row();
  }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace scalesep
