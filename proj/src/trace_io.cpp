#include "unlearn_audit/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

using nlohmann::ordered_json;

void write_trace(std::ostream& out, const AttentionTrace& trace) {
    ordered_json header;
    header["concept"] = trace.concept_name;
    header["kind"] = std::string(to_string(trace.kind));
    header["tokens"] = trace.tokens;
    header["concept_span"] = trace.concept_span;
    header["instruction_span"] = trace.instruction_span;
    header["steps"] = trace.steps;
    header["aggregation"] = trace.aggregation;
    out << header.dump() << '\n';
    for (std::size_t s = 0; s < trace.steps; ++s) {
        const auto r = trace.row(s);
        ordered_json rec;
        rec["step"] = s + 1;
        rec["dist"] = std::vector<double>(r.begin(), r.end());
        out << rec.dump() << '\n';
    }
}

void write_trace_file(const std::filesystem::path& path, const AttentionTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write trace file " + path.string());
    }
    write_trace(out, trace);
    if (!out) {
        throw IoError("failed writing trace file " + path.string());
    }
}

AttentionTrace read_trace(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                return true;
            }
        }
        return false;
    };
    auto fail = [&](const std::string& what) -> MalformedTrace {
        return MalformedTrace("trace line " + std::to_string(line_no) + ": " + what);
    };

    if (!next_line()) {
        throw MalformedTrace("trace is empty");
    }
    AttentionTrace trace;
    try {
        const auto header = ordered_json::parse(line);
        trace.concept_name = header.at("concept").get<std::string>();
        trace.kind = parse_variant(header.at("kind").get<std::string>());
        trace.tokens = header.at("tokens").get<std::vector<std::string>>();
        trace.concept_span = header.at("concept_span").get<std::vector<std::uint32_t>>();
        trace.instruction_span = header.at("instruction_span").get<std::vector<std::uint32_t>>();
        trace.steps = header.at("steps").get<std::size_t>();
        trace.aggregation = header.value("aggregation", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw fail(std::string("bad header: ") + e.what());
    } catch (const InvalidInput& e) {
        throw fail(e.what());
    }

    trace.dist.reserve(trace.steps * trace.tokens.size());
    for (std::size_t s = 1; s <= trace.steps; ++s) {
        if (!next_line()) {
            throw fail("expected " + std::to_string(trace.steps) + " step records, found " + std::to_string(s - 1));
        }
        std::vector<double> dist;
        try {
            const auto rec = ordered_json::parse(line);
            if (rec.at("step").get<std::size_t>() != s) {
                throw fail("expected step " + std::to_string(s));
            }
            dist = rec.at("dist").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw fail(std::string("bad step record: ") + e.what());
        }
        if (dist.size() != trace.tokens.size()) {
            throw fail("dist has " + std::to_string(dist.size()) + " entries for " +
                       std::to_string(trace.tokens.size()) + " tokens");
        }
        trace.dist.insert(trace.dist.end(), dist.begin(), dist.end());
    }
    if (next_line()) {
        throw fail("unexpected record after the last step");
    }
    trace.validate();
    return trace;
}

AttentionTrace read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace file " + path.string());
    }
    try {
        return read_trace(in);
    } catch (const MalformedTrace& e) {
        throw MalformedTrace(path.string() + ": " + e.what());
    }
}

}  // namespace unlearn_audit
