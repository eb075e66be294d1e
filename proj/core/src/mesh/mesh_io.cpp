#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "geovag/error.hpp"
#include "geovag/mesh/mesh.hpp"

namespace geovag {

namespace {

// Tokenizer over the .dfm text with '#' comments stripped; tracks line numbers.
class Tokens {
public:
    explicit Tokens(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) toks_.push_back({tok, lineno});
        }
    }

    bool done() const { return pos_ >= toks_.size(); }
    int line() const { return done() ? (toks_.empty() ? 0 : toks_.back().line) : toks_[pos_].line; }

    std::string word() {
        if (done()) fail("unexpected end of file");
        return toks_[pos_++].text;
    }
    long integer() {
        const int ln = line();
        const std::string t = word();
        try {
            std::size_t used = 0;
            const long v = std::stol(t, &used);
            if (used == t.size()) return v;
        } catch (const std::exception&) {
        }
        throw ValidationError("line " + std::to_string(ln) + ": expected integer, got '" + t + "'");
    }
    double real() {
        const int ln = line();
        const std::string t = word();
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used == t.size()) return v;
        } catch (const std::exception&) {
        }
        throw ValidationError("line " + std::to_string(ln) + ": expected number, got '" + t + "'");
    }
    // An optional trailing integer on the same line as the previous token.
    bool has_on_line(int ln) const { return !done() && toks_[pos_].line == ln; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError("line " + std::to_string(line()) + ": " + msg);
    }

private:
    struct Tok {
        std::string text;
        int line;
    };
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
};

std::vector<int> read_indices(Tokens& t, long k) {
    std::vector<int> v(static_cast<std::size_t>(k));
    for (auto& x : v) x = static_cast<int>(t.integer());
    return v;
}

long count(Tokens& t, const char* what) {
    const long n = t.integer();
    if (n < 0) t.fail(std::string("negative ") + what + " count");
    return n;
}

}  // namespace

DfmMesh parse_dfm_mesh(const std::string& text) {
    Tokens t(text);
    MeshDescription d;
    bool have_nodes = false;
    while (!t.done()) {
        const std::string section = t.word();
        if (section == "NODES") {
            const long n = count(t, "node");
            d.nodes.resize(static_cast<std::size_t>(n));
            for (auto& x : d.nodes) {
                const double a = t.real(), b = t.real(), c = t.real();
                x = Vec3(a, b, c);
            }
            have_nodes = true;
        } else if (section == "CELLS") {
            const long m = count(t, "cell");
            for (long i = 0; i < m; ++i) {
                const long k = t.integer();
                const CellShape shape = shape_from_node_count(static_cast<int>(k));
                d.cells.push_back({shape, read_indices(t, k)});
            }
        } else if (section == "FRACTURE_FACES") {
            const long f = count(t, "fracture face");
            for (long i = 0; i < f; ++i) {
                const int ln = t.line();
                const long k = t.integer();
                if (k < 3) t.fail("fracture face needs at least 3 nodes");
                MeshDescription::FractureDef fr;
                fr.nodes = read_indices(t, k);
                fr.width = t.real();
                if (t.has_on_line(ln)) fr.plane = static_cast<int>(t.integer());
                d.fractures.push_back(std::move(fr));
            }
        } else if (section == "FACE_WEIGHTS") {
            const long w = count(t, "face weight");
            for (long i = 0; i < w; ++i) {
                const long k = t.integer();
                MeshDescription::WeightDef wd;
                wd.nodes = read_indices(t, k);
                wd.weights.resize(static_cast<std::size_t>(k));
                for (auto& x : wd.weights) x = t.real();
                d.face_weights.push_back(std::move(wd));
            }
        } else if (section == "DIRICHLET_NODES") {
            const std::string tag = t.word();
            const long n = count(t, "node");
            auto idx = read_indices(t, n);
            auto& set = d.node_sets[tag];
            set.insert(set.end(), idx.begin(), idx.end());
        } else if (section == "WELLS") {
            const long w = count(t, "well");
            for (long i = 0; i < w; ++i) {
                if (t.word() != "WELL") t.fail("expected WELL");
                WellSpec ws;
                ws.name = t.word();
                ws.radius = t.real();
                const long e = count(t, "edge");
                for (long j = 0; j < e; ++j) {
                    const int a = static_cast<int>(t.integer());
                    const int b = static_cast<int>(t.integer());
                    ws.edges.push_back({a, b});
                }
                d.wells.push_back(std::move(ws));
            }
        } else {
            t.fail("unknown section '" + section + "'");
        }
    }
    if (!have_nodes) throw ValidationError("mesh file has no NODES section");
    return DfmMesh::build(std::move(d));
}

DfmMesh load_dfm_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mesh file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    DfmMesh mesh = parse_dfm_mesh(ss.str());
    for (const auto& w : mesh.warnings()) std::cerr << "warning: " << path.string() << ": " << w << '\n';
    return mesh;
}

std::string format_dfm_mesh(const DfmMesh& mesh) {
    std::string out;
    char buf[128];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out += "NODES " + std::to_string(mesh.num_nodes()) + "\n";
    for (const auto& x : mesh.nodes()) out += num(x.x()) + ' ' + num(x.y()) + ' ' + num(x.z()) + '\n';
    out += "CELLS " + std::to_string(mesh.num_cells()) + "\n";
    for (const auto& c : mesh.cells()) {
        out += std::to_string(c.nodes.size());
        for (int s : c.nodes) out += ' ' + std::to_string(s);
        out += '\n';
    }
    if (mesh.num_fracture_faces() > 0) {
        out += "FRACTURE_FACES " + std::to_string(mesh.num_fracture_faces()) + "\n";
        for (const auto& ff : mesh.fracture_faces()) {
            const Face& f = mesh.faces()[ff.face];
            out += std::to_string(f.nodes.size());
            for (int s : f.nodes) out += ' ' + std::to_string(s);
            out += ' ' + num(ff.width) + ' ' + std::to_string(ff.plane) + '\n';
        }
    }
    std::vector<const Face*> weighted;
    for (const auto& f : mesh.faces()) {
        const double eq = 1.0 / static_cast<double>(f.nodes.size());
        for (double b : f.weights)
            if (b != eq) {
                weighted.push_back(&f);
                break;
            }
    }
    if (!weighted.empty()) {
        out += "FACE_WEIGHTS " + std::to_string(weighted.size()) + "\n";
        for (const Face* f : weighted) {
            out += std::to_string(f->nodes.size());
            for (int s : f->nodes) out += ' ' + std::to_string(s);
            for (double b : f->weights) out += ' ' + num(b);
            out += '\n';
        }
    }
    for (const auto& [tag, set] : mesh.node_sets()) {
        out += "DIRICHLET_NODES " + tag + ' ' + std::to_string(set.size()) + "\n";
        for (std::size_t i = 0; i < set.size(); ++i) out += std::to_string(set[i]) + ((i + 1) % 16 == 0 ? '\n' : ' ');
        if (!out.empty() && out.back() != '\n') out.back() = '\n';
    }
    if (!mesh.wells().empty()) {
        out += "WELLS " + std::to_string(mesh.wells().size()) + "\n";
        for (const auto& w : mesh.wells()) {
            out += "WELL " + w.name + ' ' + num(w.radius) + ' ' + std::to_string(w.edges.size()) + '\n';
            for (const auto& e : w.edges) out += std::to_string(e[0]) + ' ' + std::to_string(e[1]) + '\n';
        }
    }
    return out;
}

void write_dfm_mesh(const DfmMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write mesh file " + path.string());
    out << format_dfm_mesh(mesh);
}

}  // namespace geovag
