#include "agdo/labels.hpp"

#include "agdo/errors.hpp"

namespace agdo {

namespace {

int mod(int x, int p)
{
    const int r = x % p;
    return r < 0 ? r + p : r;
}

constexpr std::array<std::array<int, 2>, 5> kCrossSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {0, 0}}};
constexpr std::array<std::array<int, 3>, 6> kHexSteps{
    {{0, 1, -1}, {0, -1, 1}, {1, -1, 0}, {-1, 1, 0}, {1, 0, -1}, {-1, 0, 1}}};

} // namespace

std::string to_string(Model model)
{
    return model == Model::cross ? "cross" : "hex";
}

Model model_from_string(const std::string& name)
{
    if (name == "cross") return Model::cross;
    if (name == "hex") return Model::hex;
    throw InvalidArgument("unknown model '" + name + "' (expected cross or hex)");
}

int residue_class(SiteCross site)
{
    return mod(site.n + site.m, 2);
}

int residue_class(SiteHex site)
{
    return mod(site.k - site.l, 3);
}

Label3 relabel_cross(SiteCross site)
{
    const int s = site.n + site.m;
    const int d = site.n - site.m;
    if (residue_class(site) == 0) return {(2 - s) / 2, d / 2, d / 2};
    return {(3 - s) / 2, (d - 1) / 2, (d + 1) / 2};
}

Label6 relabel_hex(SiteHex site)
{
    if (!site.valid()) {
        throw InvalidSite("relabel_hex: k + l + m must vanish, got (" + std::to_string(site.k) + ", "
                          + std::to_string(site.l) + ", " + std::to_string(site.m) + ")");
    }
    const int kl = site.k - site.l;
    const int lm = site.l - site.m;
    const int mk = site.m - site.k;
    switch (residue_class(site)) {
    case 0:
        return {{kl / 3, lm / 3, mk / 3, kl / 3, lm / 3, mk / 3}};
    case 1:
        return {{(kl - 1) / 3, (lm + 2) / 3, (mk - 1) / 3, (kl + 2) / 3, (lm - 1) / 3, (mk - 1) / 3}};
    default:
        return {{(kl + 1) / 3, (lm + 1) / 3, (mk - 2) / 3, (kl + 1) / 3, (lm - 2) / 3, (mk + 1) / 3}};
    }
}

std::array<CrossNeighbor, 5> stencil_offsets(SiteCross site)
{
    const Label3 centre = relabel_cross(site);
    std::array<CrossNeighbor, 5> out;
    for (std::size_t i = 0; i < kCrossSteps.size(); ++i) {
        const SiteCross nb{site.n + kCrossSteps[i][0], site.m + kCrossSteps[i][1]};
        out[i] = {nb, relabel_cross(nb) - centre};
    }
    return out;
}

std::array<HexNeighbor, 6> stencil_offsets(SiteHex site)
{
    const Label6 centre = relabel_hex(site);
    std::array<HexNeighbor, 6> out;
    for (std::size_t i = 0; i < kHexSteps.size(); ++i) {
        const SiteHex nb{site.k + kHexSteps[i][0], site.l + kHexSteps[i][1], site.m + kHexSteps[i][2]};
        out[i] = {nb, relabel_hex(nb) - centre};
    }
    return out;
}

Window Window::radius(Model model, int r)
{
    Window w;
    w.model = model;
    w.ranges.assign(model == Model::cross ? 2 : 3, {-r, r});
    return w;
}

void Window::validate() const
{
    const std::size_t expected = model == Model::cross ? 2 : 3;
    if (ranges.size() != expected) {
        throw InvalidArgument("window for model " + to_string(model) + " needs " + std::to_string(expected)
                              + " index ranges, got " + std::to_string(ranges.size()));
    }
    for (const auto& r : ranges) {
        if (r[0] > r[1]) throw InvalidArgument("window range is empty");
    }
    if (model == Model::hex && hex_sites().empty()) throw InvalidArgument("hex window contains no site");
}

bool Window::contains(SiteCross s) const
{
    return ranges.size() == 2 && s.n >= ranges[0][0] && s.n <= ranges[0][1] && s.m >= ranges[1][0]
           && s.m <= ranges[1][1];
}

bool Window::contains(SiteHex s) const
{
    return ranges.size() == 3 && s.valid() && s.k >= ranges[0][0] && s.k <= ranges[0][1] && s.l >= ranges[1][0]
           && s.l <= ranges[1][1] && s.m >= ranges[2][0] && s.m <= ranges[2][1];
}

std::vector<SiteCross> Window::cross_sites() const
{
    std::vector<SiteCross> out;
    if (ranges.size() != 2) return out;
    for (int n = ranges[0][0]; n <= ranges[0][1]; ++n) {
        for (int m = ranges[1][0]; m <= ranges[1][1]; ++m) out.push_back({n, m});
    }
    return out;
}

std::vector<SiteHex> Window::hex_sites() const
{
    std::vector<SiteHex> out;
    if (ranges.size() != 3) return out;
    for (int k = ranges[0][0]; k <= ranges[0][1]; ++k) {
        for (int l = ranges[1][0]; l <= ranges[1][1]; ++l) {
            const SiteHex s{k, l, -k - l};
            if (contains(s)) out.push_back(s);
        }
    }
    return out;
}

} // namespace agdo
