#include "lamcon/serialize.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace lamcon {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'F', '1'};

void write_block(std::ostream& os, const std::vector<cplx>& data) {
    static_assert(sizeof(cplx) == 2 * sizeof(double));
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(cplx)));
}

std::vector<cplx> read_block(std::istream& is, size_t count) {
    std::vector<cplx> data(count);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(cplx)));
    if (!is) throw Error("container truncated while reading a data block");
    return data;
}

void write_container(const std::string& path, const json& header,
                     const std::vector<const std::vector<cplx>*>& blocks) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    const std::string h = header.dump();
    const std::uint32_t len = static_cast<std::uint32_t>(h.size());
    os.write(kMagic, 4);
    os.write(reinterpret_cast<const char*>(&len), 4);
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (const auto* b : blocks) write_block(os, *b);
}

json read_header(std::ifstream& is, const std::string& path) {
    char magic[4];
    std::uint32_t len = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&len), 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw Error(path + " is not a field container");
    std::string h(len, '\0');
    is.read(h.data(), len);
    if (!is) throw Error("container truncated while reading the header");
    return json::parse(h);
}

json field_header(const GridField& f) {
    json j;
    j["degree"] = static_cast<int>(f.degree());
    j["dim"] = f.dim();
    return j;
}

std::vector<const std::vector<cplx>*> field_blocks(const GridField& f) {
    switch (f.degree()) {
        case FormDegree::Zero: return {&f.value().raw()};
        case FormDegree::One: return {&f.dz().raw(), &f.dzbar().raw()};
        default: return {&f.dzdzbar().raw()};
    }
}

GridField read_field(std::istream& is, const Domain& dom, const json& j) {
    const auto deg = static_cast<FormDegree>(j.at("degree").get<int>());
    const int dim = j.at("dim").get<int>();
    const size_t count = static_cast<size_t>(dom.points()) * dim * dim;
    auto read_mf = [&] {
        MatrixField m(dom, dim);
        m.raw() = read_block(is, count);
        return m;
    };
    switch (deg) {
        case FormDegree::Zero: return GridField::zero_form(read_mf());
        case FormDegree::One: {
            MatrixField a = read_mf();
            MatrixField b = read_mf();
            return GridField::one_form(std::move(a), std::move(b));
        }
        default: return GridField::two_form(read_mf());
    }
}

}  // namespace

json domain_to_json(const Domain& dom) {
    json j;
    j["kind"] = dom.is_torus() ? "torus" : "patch";
    j["nx"] = dom.nx();
    j["ny"] = dom.ny();
    if (dom.is_torus()) {
        j["modulus_re"] = dom.modulus().real();
        j["modulus_im"] = dom.modulus().imag();
    } else {
        j["x0"] = dom.x0();
        j["x1"] = dom.x1();
        j["y0"] = dom.y0();
        j["y1"] = dom.y1();
    }
    return j;
}

Domain domain_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int nx = j.at("nx").get<int>(), ny = j.at("ny").get<int>();
    if (kind == "torus")
        return Domain::torus(cplx(j.at("modulus_re").get<double>(),
                                  j.at("modulus_im").get<double>()),
                             nx, ny);
    if (kind == "patch")
        return Domain::patch(j.at("x0").get<double>(), j.at("x1").get<double>(),
                             j.at("y0").get<double>(), j.at("y1").get<double>(), nx, ny);
    throw Error("unknown domain kind '" + kind + "'");
}

void save_grid_field(const GridField& f, const std::string& path) {
    json j;
    j["format"] = "lamcon-container";
    j["version"] = 1;
    j["payload"] = "grid_field";
    j["domain"] = domain_to_json(f.domain());
    j["field"] = field_header(f);
    write_container(path, j, field_blocks(f));
}

GridField load_grid_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    json j = read_header(is, path);
    if (j.at("payload") != "grid_field") throw Error(path + " does not hold a grid field");
    const Domain dom = domain_from_json(j.at("domain"));
    return read_field(is, dom, j.at("field"));
}

void save_family(const LambdaFamily& fam, const std::string& path) {
    json j;
    j["format"] = "lamcon-container";
    j["version"] = 1;
    j["payload"] = "lambda_family";
    j["domain"] = domain_to_json(fam.domain());
    j["kmin"] = fam.kmin();
    j["kmax"] = fam.kmax();
    j["dim"] = fam.dim();
    j["provenance"] = fam.provenance;
    j["truncation_residual"] = fam.truncation_residual();
    std::vector<const std::vector<cplx>*> blocks;
    for (int k = fam.kmin(); k <= fam.kmax(); ++k) {
        blocks.push_back(&fam.coefficient(k).dz().raw());
        blocks.push_back(&fam.coefficient(k).dzbar().raw());
    }
    write_container(path, j, blocks);
}

LambdaFamily load_family(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    json j = read_header(is, path);
    if (j.at("payload") != "lambda_family") throw Error(path + " does not hold a family");
    const Domain dom = domain_from_json(j.at("domain"));
    const int kmin = j.at("kmin").get<int>(), kmax = j.at("kmax").get<int>();
    const int dim = j.at("dim").get<int>();
    LambdaFamily fam(dom, kmin, kmax, dim);
    fam.provenance = j.value("provenance", "");
    fam.add_truncation_residual(j.value("truncation_residual", 0.0));
    const size_t count = static_cast<size_t>(dom.points()) * dim * dim;
    for (int k = kmin; k <= kmax; ++k) {
        MatrixField a(dom, dim), b(dom, dim);
        a.raw() = read_block(is, count);
        b.raw() = read_block(is, count);
        fam.set_coefficient(k, GridField::one_form(std::move(a), std::move(b)));
    }
    return fam;
}

void save_solution(const SolutionData& sol, const std::string& path) {
    json j;
    j["format"] = "lamcon-container";
    j["version"] = 1;
    j["payload"] = "solution";
    j["domain"] = domain_to_json(sol.domain);
    j["target"] = (sol.target == Target::H3) ? "h3" : "s3";
    write_container(path, j, {&sol.u.raw(), &sol.q.raw()});
}

SolutionData load_solution(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    json j = read_header(is, path);
    if (j.at("payload") != "solution") throw Error(path + " does not hold solution data");
    SolutionData sol;
    sol.domain = domain_from_json(j.at("domain"));
    sol.target = (j.at("target") == "h3") ? Target::H3 : Target::S3;
    const size_t count = static_cast<size_t>(sol.domain.points());
    sol.u = MatrixField(sol.domain, 1);
    sol.q = MatrixField(sol.domain, 1);
    sol.u.raw() = read_block(is, count);
    sol.q.raw() = read_block(is, count);
    return sol;
}

}  // namespace lamcon
