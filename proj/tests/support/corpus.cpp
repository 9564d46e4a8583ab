#include "corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rvsdg::test
{

std::vector<std::string>
corpus_names()
{
  std::vector<std::string> names;
  for (const auto & entry : std::filesystem::directory_iterator(RVSDG_CORPUS_DIR))
  {
    if (entry.path().extension() == ".ir")
      names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string
corpus_text(const std::string & name)
{
  std::ifstream in(std::string(RVSDG_CORPUS_DIR) + "/" + name + ".ir");
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

ir::Module
corpus_module(const std::string & name)
{
  return ir::parse(corpus_text(name));
}

}
