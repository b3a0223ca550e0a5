#include "cotaudit/corpus.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "cotaudit/audit.hpp"
#include "cotaudit/errors.hpp"

namespace cotaudit {

std::vector<Query> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read corpus " + path.string());
    std::vector<Query> corpus;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        Query query;
        try {
            query = query_from_json(nlohmann::json::parse(line));
            validate(query);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where + ": " + e.what());
        } catch (const DomainError& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (!ids.insert(query.id).second) throw ConfigError(where + ": duplicate query id '" + query.id + "'");
        corpus.push_back(std::move(query));
    }
    return corpus;
}

void validate_corpus(const std::vector<Query>& corpus) {
    std::set<std::string> ids;
    for (const auto& query : corpus) {
        try {
            validate(query);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        if (!ids.insert(query.id).second) throw ConfigError("duplicate query id '" + query.id + "'");
    }
}

}  // namespace cotaudit
