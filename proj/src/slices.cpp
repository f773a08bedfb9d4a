#include "slicenet/slices.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>

namespace slicenet {

using nlohmann::json;

std::string to_string(const SliceId& id)
{
    return "s(" + std::to_string(id.tenant) + "," + std::to_string(id.slice) + ")";
}

std::size_t RequestBatch::vm_count() const
{
    std::size_t n = 0;
    for (const auto& s : slices) {
        n += s.vms.size();
    }
    return n;
}

std::size_t RequestBatch::vl_count() const
{
    std::size_t n = 0;
    for (const auto& s : slices) {
        n += s.vls.size();
    }
    return n;
}

int RequestBatch::tenant_count() const
{
    std::set<int> t;
    for (const auto& s : slices) {
        t.insert(s.id.tenant);
    }
    return static_cast<int>(t.size());
}

const SliceRequest& RequestBatch::find(const SliceId& id) const
{
    for (const auto& s : slices) {
        if (s.id == id) {
            return s;
        }
    }
    throw SliceError("no slice " + to_string(id) + " in batch");
}

RequestBatch RequestBatch::subset(const std::vector<SliceId>& keep) const
{
    RequestBatch out;
    for (const auto& s : slices) {
        if (std::find(keep.begin(), keep.end(), s.id) != keep.end()) {
            out.slices.push_back(s);
        }
    }
    return out;
}

RequestBatch RequestBatch::without(const std::vector<SliceId>& drop) const
{
    RequestBatch out;
    for (const auto& s : slices) {
        if (std::find(drop.begin(), drop.end(), s.id) == drop.end()) {
            out.slices.push_back(s);
        }
    }
    return out;
}

void RequestBatch::validate() const
{
    std::set<SliceId> ids;
    for (const auto& s : slices) {
        const std::string name = to_string(s.id);
        if (!ids.insert(s.id).second) {
            throw SliceError("duplicate slice id " + name);
        }
        for (std::size_t m = 0; m < s.vms.size(); ++m) {
            const auto& vm = s.vms[m];
            const auto& d = vm.demand;
            if (vm.vm != static_cast<int>(m) || vm.slice != s.id) {
                throw SliceError(name + ": VM " + std::to_string(m) + " is mislabelled");
            }
            if (d.compute < 0 || d.memory < 0 || d.storage < 0) {
                throw SliceError(name + ": VM " + std::to_string(m) + " has a negative demand");
            }
            if (!(d.compute > 0 || d.memory > 0 || d.storage > 0)) {
                throw SliceError(name + ": VM " + std::to_string(m) + " demands nothing");
            }
        }
        std::set<std::pair<int, int>> pairs;
        for (const auto& vl : s.vls) {
            const int n = static_cast<int>(s.vms.size());
            if (vl.a < 0 || vl.b < 0 || vl.a >= n || vl.b >= n || vl.a == vl.b) {
                throw SliceError(name + ": VL endpoints must be two distinct VMs of the slice");
            }
            if (!pairs.insert(std::minmax(vl.a, vl.b)).second) {
                throw SliceError(name + ": duplicate VL between VMs " + std::to_string(vl.a)
                                 + " and " + std::to_string(vl.b));
            }
            if (!(vl.rate > 0) || !(vl.max_delay >= 0)) {
                throw SliceError(name + ": VL needs rate > 0 and max delay >= 0");
            }
        }
    }
}

const char* to_string(VlShape shape)
{
    switch (shape) {
    case VlShape::mesh:
        return "mesh";
    case VlShape::chain:
        return "chain";
    case VlShape::star:
        return "star";
    }
    return "?";
}

VlShape parse_vl_shape(const std::string& s)
{
    if (s == "mesh") {
        return VlShape::mesh;
    }
    if (s == "chain") {
        return VlShape::chain;
    }
    if (s == "star") {
        return VlShape::star;
    }
    throw SliceError("unknown VL shape '" + s + "' (mesh, chain or star)");
}

RequestBatch generate_batch(int tenant_count, int slices_per_tenant, int vms_per_slice,
                            VlShape shape, std::uint64_t seed, const SliceParams& params)
{
    if (tenant_count < 1 || slices_per_tenant < 1 || vms_per_slice < 1) {
        throw SliceError("tenant, slice and VM counts must be at least 1");
    }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < vms_per_slice; ++a) {
        for (int b = a + 1; b < vms_per_slice; ++b) {
            const bool take = shape == VlShape::mesh || (shape == VlShape::chain && b == a + 1)
                || (shape == VlShape::star && a == 0);
            if (take) {
                edges.emplace_back(a, b);
            }
        }
    }

    RequestBatch batch;
    for (int t = 0; t < tenant_count; ++t) {
        for (int k = 0; k < slices_per_tenant; ++k) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(k)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> rate(params.rate.lo, params.rate.hi);
            std::uniform_real_distribution<double> delay(params.max_delay.lo, params.max_delay.hi);

            SliceRequest s;
            s.id = {t, k};
            for (int m = 0; m < vms_per_slice; ++m) {
                s.vms.push_back({s.id, m, params.vm_demand});
            }
            for (auto [a, b] : edges) {
                const double r = rate(rng);
                const double d = delay(rng);
                s.vls.push_back({a, b, r, d});
            }
            batch.slices.push_back(std::move(s));
        }
    }
    return batch;
}

double total_demand(const SliceRequest& slice, Resource r)
{
    double sum = 0.0;
    for (const auto& vm : slice.vms) {
        sum += vm.demand[r];
    }
    return sum;
}

double total_demand(const RequestBatch& batch, Resource r)
{
    double sum = 0.0;
    for (const auto& s : batch.slices) {
        sum += total_demand(s, r);
    }
    return sum;
}

double total_rate(const SliceRequest& slice)
{
    double sum = 0.0;
    for (const auto& vl : slice.vls) {
        sum += vl.rate;
    }
    return sum;
}

double total_rate(const RequestBatch& batch)
{
    double sum = 0.0;
    for (const auto& s : batch.slices) {
        sum += total_rate(s);
    }
    return sum;
}

RequestBatch load_batch_json(std::istream& in)
{
    RequestBatch batch;
    try {
        json j;
        in >> j;
        for (const auto& js : j.at("slices")) {
            SliceRequest s;
            s.id = {js.at("tenant").get<int>(), js.at("slice").get<int>()};
            int m = 0;
            for (const auto& jv : js.at("vms")) {
                VmDemand vm;
                vm.slice = s.id;
                vm.vm = m++;
                vm.demand = {jv.at("com_mhz").get<double>(), jv.at("mem_gb").get<double>(),
                             jv.at("sto_gb").get<double>()};
                s.vms.push_back(vm);
            }
            for (const auto& jl : js.value("vls", json::array())) {
                s.vls.push_back({jl.at("a").get<int>(), jl.at("b").get<int>(),
                                 jl.at("rate_kbps").get<double>(),
                                 jl.at("max_delay_ms").get<double>()});
            }
            batch.slices.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw SliceError(std::string("slice batch JSON: ") + e.what());
    }
    batch.validate();
    return batch;
}

void write_batch_json(const RequestBatch& batch, std::ostream& out)
{
    json j;
    j["slices"] = json::array();
    for (const auto& s : batch.slices) {
        json js{{"tenant", s.id.tenant}, {"slice", s.id.slice}};
        js["vms"] = json::array();
        for (const auto& vm : s.vms) {
            js["vms"].push_back({{"com_mhz", vm.demand.compute},
                                 {"mem_gb", vm.demand.memory},
                                 {"sto_gb", vm.demand.storage}});
        }
        js["vls"] = json::array();
        for (const auto& vl : s.vls) {
            js["vls"].push_back({{"a", vl.a},
                                 {"b", vl.b},
                                 {"rate_kbps", vl.rate},
                                 {"max_delay_ms", vl.max_delay}});
        }
        j["slices"].push_back(std::move(js));
    }
    out << j.dump(2) << '\n';
}

} // namespace slicenet
