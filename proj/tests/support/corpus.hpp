#ifndef RVSDG_TESTS_CORPUS_HPP
#define RVSDG_TESTS_CORPUS_HPP

#include <rvsdg/ir.hpp>

#include <string>
#include <vector>

namespace rvsdg::test
{

/// Names of the committed corpus programs, sorted, without the .ir extension.
std::vector<std::string>
corpus_names();

std::string
corpus_text(const std::string & name);

ir::Module
corpus_module(const std::string & name);

/// Seeds of the random corpus.
inline constexpr std::uint64_t random_corpus_size = 500;

}

#endif
