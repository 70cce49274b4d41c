#include "splatsr/ply_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "splatsr/errors.hpp"

namespace splatsr {

namespace {

constexpr int kNumProps = 62;

std::vector<std::string> expected_property_names() {
    std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz",
                                      "f_dc_0", "f_dc_1", "f_dc_2"};
    for (int i = 0; i < 45; ++i) names.push_back("f_rest_" + std::to_string(i));
    names.push_back("opacity");
    for (int i = 0; i < 3; ++i) names.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i) names.push_back("rot_" + std::to_string(i));
    return names;
}

static_assert(std::endian::native == std::endian::little,
              "PLY reader/writer assumes a little-endian host");

}  // namespace

SplatScene<float> load_ply(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("load_ply: cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(file, line) || line != "ply")
        throw IoError("load_ply: malformed header, missing 'ply' magic");
    if (!std::getline(file, line) || line != "format binary_little_endian 1.0")
        throw IoError("load_ply: unsupported format, expected binary_little_endian 1.0");

    long vertex_count = -1;
    std::vector<std::string> property_names;
    bool in_vertex_element = false;
    bool saw_end = false;
    while (std::getline(file, line)) {
        if (line == "end_header") {
            saw_end = true;
            break;
        }
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        if (token == "comment" || token == "obj_info") continue;
        if (token == "element") {
            std::string name;
            long count;
            ls >> name >> count;
            if (name == "vertex") {
                vertex_count = count;
                in_vertex_element = true;
            } else {
                in_vertex_element = false;
            }
            continue;
        }
        if (token == "property") {
            if (!in_vertex_element) continue;
            std::string type, name;
            ls >> type >> name;
            if (type == "list")
                throw IoError("load_ply: malformed header, list property in vertex element");
            if (type != "float" && type != "float32")
                throw IoError("load_ply: unsupported property type '" + type + "' for '" + name +
                              "'");
            property_names.push_back(name);
            continue;
        }
        throw IoError("load_ply: malformed header line '" + line + "'");
    }
    if (!saw_end) throw IoError("load_ply: malformed header, no end_header");
    if (vertex_count < 0) throw IoError("load_ply: malformed header, no vertex element");

    // Map each expected field to its column; extra float properties are read
    // and ignored.
    const auto expected = expected_property_names();
    std::vector<int> column(expected.size(), -1);
    for (size_t e = 0; e < expected.size(); ++e) {
        for (size_t p = 0; p < property_names.size(); ++p) {
            if (property_names[p] == expected[e]) {
                column[e] = static_cast<int>(p);
                break;
            }
        }
        if (column[e] < 0)
            throw IoError("load_ply: missing required field '" + expected[e] + "'");
    }

    const size_t stride = property_names.size();
    std::vector<float> row(stride);
    SplatScene<float> scene;
    scene.splats.resize(vertex_count);
    for (long i = 0; i < vertex_count; ++i) {
        file.read(reinterpret_cast<char*>(row.data()), stride * sizeof(float));
        if (!file)
            throw IoError("load_ply: truncated payload at vertex " + std::to_string(i) + " of " +
                          std::to_string(vertex_count));
        std::array<float, kNumProps> v;
        for (int e = 0; e < kNumProps; ++e) {
            v[e] = row[column[e]];
            if (!std::isfinite(v[e]))
                throw IoError("load_ply: non-finite value in field '" + expected[e] +
                              "' at vertex " + std::to_string(i));
        }
        GaussianSplat<float>& g = scene.splats[i];
        g.position = Vec3<float>(v[0], v[1], v[2]);
        for (int c = 0; c < 3; ++c) g.sh_coeffs[c][0] = v[6 + c];
        for (int c = 0; c < 3; ++c)
            for (int k = 1; k < kShCoeffs; ++k) g.sh_coeffs[c][k] = v[9 + c * 15 + (k - 1)];
        g.opacity_logit = v[54];
        g.log_scale = Vec3<float>(v[55], v[56], v[57]);
        UnitQuaternion<float> q(v[58], v[59], v[60], v[61]);
        if (!(q.norm() > 0.0f))
            throw IoError("load_ply: zero-norm rotation at vertex " + std::to_string(i));
        g.rotation = q.normalized();
    }
    scene.update_bounds();
    return scene;
}

void save_ply(const SplatScene<float>& scene, const std::filesystem::path& path) {
    if (scene.empty()) throw ValueError("save_ply: empty scene");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("save_ply: cannot open '" + path.string() + "' for writing");

    file << "ply\nformat binary_little_endian 1.0\nelement vertex " << scene.size() << "\n";
    for (const auto& name : expected_property_names()) file << "property float " << name << "\n";
    file << "end_header\n";

    std::array<float, kNumProps> v;
    for (const auto& g : scene.splats) {
        v[0] = g.position.x();
        v[1] = g.position.y();
        v[2] = g.position.z();
        v[3] = v[4] = v[5] = 0.0f;  // normals are zeros by convention
        for (int c = 0; c < 3; ++c) v[6 + c] = g.sh_coeffs[c][0];
        for (int c = 0; c < 3; ++c)
            for (int k = 1; k < kShCoeffs; ++k) v[9 + c * 15 + (k - 1)] = g.sh_coeffs[c][k];
        v[54] = g.opacity_logit;
        v[55] = g.log_scale.x();
        v[56] = g.log_scale.y();
        v[57] = g.log_scale.z();
        v[58] = g.rotation.w;
        v[59] = g.rotation.x;
        v[60] = g.rotation.y;
        v[61] = g.rotation.z;
        file.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(float));
    }
    if (!file) throw IoError("save_ply: write failed for '" + path.string() + "'");
}

}  // namespace splatsr
