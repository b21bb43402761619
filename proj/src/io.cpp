#include "descent/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace descent {

namespace {

std::string next_content_line(std::istream& in, bool required = true) {
    std::string line;
    while (std::getline(in, line)) {
        size_t p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos) continue;
        if (line[p] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }
    if (required) throw parse_error("unexpected end of input");
    return "";
}

int parse_int(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw parse_error("");
        return v;
    } catch (...) {
        throw parse_error(std::string("bad integer for ") + what + ": '" + s + "'");
    }
}

} // namespace

std::string write_ldg(const LayeredDigraph& g) {
    std::ostringstream os;
    os << "ldg 1\nm " << g.m() << "\ndepth " << g.depth() << "\n";
    for (int l = 0; l <= g.depth(); ++l) {
        std::vector<std::string> ids;
        for (int v : g.level_vertices(l)) ids.push_back(g.id_of(v));
        std::sort(ids.begin(), ids.end());
        os << "level " << l << ":";
        for (const auto& id : ids) os << " " << id;
        os << "\n";
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (int v = 0; v < g.size(); ++v)
        for (int w : g.out(v)) edges.push_back({g.id_of(v), g.id_of(w)});
    std::sort(edges.begin(), edges.end());
    for (const auto& [s, d] : edges) os << "edge " << s << " " << d << "\n";
    return os.str();
}

namespace {

// Reads the body shared by ldg parsing and the seed block inside exs. The
// caller has consumed the header line; `pending` receives the first line
// that does not belong to the block (empty at end of input).
LayeredDigraph read_ldg_body(std::istream& in, std::string* pending) {
    std::string line = next_content_line(in);
    std::istringstream ms(line);
    std::string kw, val;
    ms >> kw >> val;
    if (kw != "m") throw parse_error("expected 'm <out-valency>', got '" + line + "'");
    int m = parse_int(val, "m");
    line = next_content_line(in);
    std::istringstream ds(line);
    ds >> kw >> val;
    if (kw != "depth") throw parse_error("expected 'depth <D>', got '" + line + "'");
    int depth = parse_int(val, "depth");
    LayeredDigraph::Builder b;
    for (int l = 0; l <= depth; ++l) {
        line = next_content_line(in);
        std::istringstream ls(line);
        std::string levkw, levno;
        ls >> levkw >> levno;
        if (levkw != "level" || levno != std::to_string(l) + ":")
            throw parse_error("expected 'level " + std::to_string(l) + ":', got '" + line +
                              "'");
        std::string id;
        while (ls >> id) b.vertex(id, l);
    }
    std::string next;
    while (true) {
        next = next_content_line(in, false);
        if (next.empty()) break;
        std::istringstream es(next);
        std::string kw2;
        es >> kw2;
        if (kw2 != "edge") break;
        std::string s, d;
        if (!(es >> s >> d)) throw parse_error("bad edge line: '" + next + "'");
        b.edge(s, d);
    }
    if (pending) *pending = next;
    try {
        return b.build(m);
    } catch (const op_error& e) {
        throw parse_error(e.what());
    }
}

} // namespace

LayeredDigraph read_ldg(std::istream& in) {
    std::string header = next_content_line(in);
    if (header != "ldg 1") throw parse_error("expected 'ldg 1' header, got '" + header + "'");
    std::string pending;
    LayeredDigraph g = read_ldg_body(in, &pending);
    if (!pending.empty()) throw parse_error("trailing content: '" + pending + "'");
    return g;
}

LayeredDigraph read_ldg_string(const std::string& text) {
    std::istringstream in(text);
    return read_ldg(in);
}

std::string write_exs(const ExpansionSystem& sys) {
    std::ostringstream os;
    os << "exs 1\nm " << sys.m << "\nk " << sys.k << "\n";
    os << write_ldg(sys.seed);
    for (const auto& [members, colour] : sys.frontier_colours) {
        std::vector<std::string> ids = members;
        std::sort(ids.begin(), ids.end());
        os << "class " << sys.seed.depth() << " " << colour << ":";
        for (const auto& id : ids) os << " " << id;
        os << "\n";
    }
    for (const auto& [colour, cell] : sys.cells) {
        os << "cell " << colour << " size " << cell.size << "\n";
        for (const auto& child : cell.children) {
            os << "child " << child.colour << " pattern";
            auto pat = child.pattern;
            std::sort(pat.begin(), pat.end());
            for (auto [p, c] : pat) os << " " << p << ":" << c;
            os << "\n";
        }
    }
    return os.str();
}

ExpansionSystem read_exs(std::istream& in) {
    std::string header = next_content_line(in);
    if (header != "exs 1") throw parse_error("expected 'exs 1' header, got '" + header + "'");
    ExpansionSystem sys;
    std::string line = next_content_line(in);
    {
        std::istringstream s(line);
        std::string kw, val;
        s >> kw >> val;
        if (kw != "m") throw parse_error("expected 'm', got '" + line + "'");
        sys.m = parse_int(val, "m");
    }
    line = next_content_line(in);
    {
        std::istringstream s(line);
        std::string kw, val;
        s >> kw >> val;
        if (kw != "k") throw parse_error("expected 'k', got '" + line + "'");
        sys.k = parse_int(val, "k");
    }
    line = next_content_line(in);
    if (line != "ldg 1") throw parse_error("expected embedded 'ldg 1' seed block");
    std::string pending;
    sys.seed = read_ldg_body(in, &pending);

    // class lines, then cell/child lines
    int current_cell = -1;
    while (!pending.empty()) {
        std::istringstream s(pending);
        std::string kw;
        s >> kw;
        if (kw == "class") {
            std::string lev, colour;
            s >> lev >> colour;
            if (colour.empty() || colour.back() != ':')
                throw parse_error("bad class line: '" + pending + "'");
            colour.pop_back();
            int lv = parse_int(lev, "class level");
            if (lv != sys.seed.depth())
                throw parse_error("class line must name the seed's last level");
            std::vector<VertexId> members;
            std::string id;
            while (s >> id) members.push_back(id);
            sys.frontier_colours.push_back({members, parse_int(colour, "class colour")});
        } else if (kw == "cell") {
            std::string colour, sizekw, size;
            s >> colour >> sizekw >> size;
            if (sizekw != "size") throw parse_error("bad cell line: '" + pending + "'");
            current_cell = parse_int(colour, "cell colour");
            CellType cell;
            cell.colour = current_cell;
            cell.size = parse_int(size, "cell size");
            sys.cells[current_cell] = cell;
        } else if (kw == "child") {
            if (current_cell < 0) throw parse_error("child line before any cell line");
            std::string colour, patkw;
            s >> colour >> patkw;
            if (patkw != "pattern") throw parse_error("bad child line: '" + pending + "'");
            CellChild child;
            child.colour = parse_int(colour, "child colour");
            std::string pc;
            while (s >> pc) {
                auto colon = pc.find(':');
                if (colon == std::string::npos)
                    throw parse_error("bad pattern pair: '" + pc + "'");
                child.pattern.push_back({parse_int(pc.substr(0, colon), "pattern parent"),
                                         parse_int(pc.substr(colon + 1), "pattern child")});
            }
            sys.cells[current_cell].children.push_back(child);
        } else {
            throw parse_error("unexpected line: '" + pending + "'");
        }
        pending = next_content_line(in, false);
    }
    try {
        sys.check();
    } catch (const op_error& e) {
        throw parse_error(e.what());
    }
    return sys;
}

ExpansionSystem read_exs_string(const std::string& text) {
    std::istringstream in(text);
    return read_exs(in);
}

std::string write_ldgx(const FGObject& f) {
    std::ostringstream os;
    os << "ldgx 1\nm " << f.m() << "\ndepth " << f.max_gen_level() << "\n";
    for (int l = 0; l <= f.max_gen_level(); ++l) {
        std::vector<std::string> ids;
        for (int v = 0; v < f.size(); ++v)
            if (f.gen_level(v) == l) ids.push_back(f.id_of(v));
        std::sort(ids.begin(), ids.end());
        os << "level " << l << ":";
        for (const auto& id : ids) os << " " << id;
        os << "\n";
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (int v = 0; v < f.size(); ++v)
        for (int w : f.out(v)) edges.push_back({f.id_of(v), f.id_of(w)});
    std::sort(edges.begin(), edges.end());
    for (const auto& [s, d] : edges) os << "edge " << s << " " << d << "\n";
    for (const auto& id : f.generator_ids()) os << "generator " << id << "\n";
    for (const auto& id : f.frontier_ids()) os << "frontier " << id << "\n";
    return os.str();
}

FGObject read_ldgx(std::istream& in, const ExpansionSystem& gamma) {
    std::string header = next_content_line(in);
    if (header != "ldgx 1") throw parse_error("expected 'ldgx 1' header");
    std::string line = next_content_line(in);
    {
        std::istringstream s(line);
        std::string kw, val;
        s >> kw >> val;
        if (kw != "m") throw parse_error("expected 'm'");
        if (parse_int(val, "m") != gamma.m)
            throw parse_error("object out-valency differs from the reference system");
    }
    line = next_content_line(in);
    int depth;
    {
        std::istringstream s(line);
        std::string kw, val;
        s >> kw >> val;
        if (kw != "depth") throw parse_error("expected 'depth'");
        depth = parse_int(val, "depth");
    }
    FGObject::Builder b(gamma);
    std::map<std::string, int> declared_level;
    for (int l = 0; l <= depth; ++l) {
        line = next_content_line(in);
        std::istringstream ls(line);
        std::string levkw, levno;
        ls >> levkw >> levno;
        if (levkw != "level" || levno != std::to_string(l) + ":")
            throw parse_error("expected 'level " + std::to_string(l) + ":'");
        std::string id;
        while (ls >> id) {
            b.vertex(id);
            declared_level[id] = l;
        }
    }
    std::vector<std::string> declared_gens, declared_frontier;
    while (true) {
        line = next_content_line(in, false);
        if (line.empty()) break;
        std::istringstream s(line);
        std::string kw, x, y;
        s >> kw;
        if (kw == "edge") {
            if (!(s >> x >> y)) throw parse_error("bad edge line");
            b.edge(x, y);
        } else if (kw == "generator") {
            s >> x;
            declared_gens.push_back(x);
        } else if (kw == "frontier") {
            s >> x;
            declared_frontier.push_back(x);
        } else {
            throw parse_error("unexpected line: '" + line + "'");
        }
    }
    FGObject f = [&] {
        try {
            return b.build();
        } catch (const op_error& e) {
            throw parse_error(e.what());
        }
    }();
    for (const auto& [id, lvl] : declared_level)
        if (f.gen_level(f.index_of(id)) != lvl)
            throw parse_error("declared level of " + id + " does not match the generator "
                              "distance");
    std::sort(declared_gens.begin(), declared_gens.end());
    if (declared_gens != f.generator_ids())
        throw parse_error("generator lines do not match the minimal vertices");
    std::sort(declared_frontier.begin(), declared_frontier.end());
    if (declared_frontier != f.frontier_ids())
        throw parse_error("frontier lines do not match the out-edge-free vertices");
    return f;
}

LayeredDigraph load_digraph(const std::string& path, int depth) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".exs") {
        ExpansionSystem sys = read_exs(in);
        return expand(sys, depth);
    }
    LayeredDigraph g = read_ldg(in);
    if (depth >= 0 && depth < g.depth()) g = g.truncate(depth);
    return g;
}

ExpansionSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    return read_exs(in);
}

} // namespace descent
