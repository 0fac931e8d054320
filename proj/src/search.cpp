#include "ffcc/search.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "ffcc/config_io.hpp"

namespace ffcc {

SearchGrid parse_search_grid(std::istream& in) {
  SearchGrid grid;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw Error(fmt::format("search grid line {}: expected key = values", line_no));
    const std::string key(trim(s.substr(0, eq)));
    const std::string_view rest = s.substr(eq + 1);
    try {
      if (key == "sweeps") {
        grid.sweeps = parse_int(rest, key);
        if (grid.sweeps < 1) throw Error("sweeps must be >= 1");
        continue;
      }
      std::vector<double> values;
      std::size_t start = 0;
      while (true) {
        const auto comma = rest.find(',', start);
        values.push_back(parse_double(rest.substr(start, comma == rest.npos ? rest.npos : comma - start), key));
        if (comma == rest.npos) break;
        start = comma + 1;
      }
      // Validates the key name.
      TrainConfig probe;
      set_config_value(probe, key, fmt::format("{}", values.front()));
      grid.axes.emplace_back(key, std::move(values));
    } catch (const Error& e) {
      throw Error(fmt::format("search grid line {}: {}", line_no, e.what()));
    }
  }
  return grid;
}

SearchGrid load_search_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open search grid '{}'", path));
  return parse_search_grid(in);
}

SearchResult coordinate_descent(const SearchGrid& grid, const TrainConfig& base, const ConfigScore& score) {
  std::map<std::string, double> cache;
  SearchResult result;
  auto evaluate = [&](const TrainConfig& c, const std::string& key, double value) {
    const std::string id = format_config(c);
    if (auto it = cache.find(id); it != cache.end()) return it->second;
    const double s = score(c);
    cache.emplace(id, s);
    result.history.push_back({key, value, s});
    return s;
  };

  result.best = base;
  result.best_score = evaluate(base, "", 0.0);
  for (int sweep = 0; sweep < grid.sweeps; ++sweep) {
    bool changed = false;
    for (const auto& [key, values] : grid.axes) {
      TrainConfig best_here = result.best;
      double best_here_score = result.best_score;
      for (double v : values) {
        TrainConfig c = result.best;
        set_config_value(c, key, fmt::format("{}", v));
        c.validate();
        const double s = evaluate(c, key, v);
        if (s < best_here_score) {
          best_here = c;
          best_here_score = s;
        }
      }
      if (best_here_score < result.best_score) {
        result.best = best_here;
        result.best_score = best_here_score;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return result;
}

SearchResult hyperparam_search(std::span<const TrainingExample> examples, const SearchGrid& grid,
                               const TrainConfig& base, int folds, std::ostream* log) {
  return coordinate_descent(grid, base, [&](const TrainConfig& c) {
    const double avg = cross_validate(examples, folds, c).overall.avg;
    if (log) {
      std::string flat = format_config(c);
      std::replace(flat.begin(), flat.end(), '\n', ' ');
      fmt::print(*log, "avg {:.4f}  {}\n", avg, flat);
    }
    return avg;
  });
}

}  // namespace ffcc
