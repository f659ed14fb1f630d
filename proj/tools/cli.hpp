#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bosegas {

// full command line, argv[0] included; returns the process exit status
int bosegas_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bosegas
