#pragma once

#include "slicenet/topology.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace slicenet {

struct SliceId {
    int tenant = 0;
    int slice = 0;

    auto operator<=>(const SliceId&) const = default;
};

std::string to_string(const SliceId& id);

struct VmDemand {
    SliceId slice;
    int vm = 0;  // index within the slice
    ResourceVector demand;
};

/// Virtual link between two VMs of the same slice (indices within the slice).
struct VlDemand {
    int a = 0;
    int b = 0;
    double rate = 0.0;       // Kbps
    double max_delay = 0.0;  // ms
};

enum class SliceStatus { pending, accepted, rejected };

struct SliceRequest {
    SliceId id;
    std::vector<VmDemand> vms;
    std::vector<VlDemand> vls;
    SliceStatus status = SliceStatus::pending;
};

class SliceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RequestBatch {
    std::vector<SliceRequest> slices;

    std::size_t size() const { return slices.size(); }
    bool empty() const { return slices.empty(); }
    std::size_t vm_count() const;
    std::size_t vl_count() const;
    int tenant_count() const;

    const SliceRequest& find(const SliceId& id) const;

    /// Slices whose id is in `keep`, original order preserved.
    RequestBatch subset(const std::vector<SliceId>& keep) const;
    RequestBatch without(const std::vector<SliceId>& drop) const;

    /// Throws SliceError on the first broken invariant.
    void validate() const;
};

enum class VlShape { mesh, chain, star };

const char* to_string(VlShape shape);
VlShape parse_vl_shape(const std::string& s);

struct SliceParams {
    ResourceVector vm_demand{1000.0, 64.0, 120.0};
    Range rate{1e4, 1.1e5};
    Range max_delay{5.0, 14.0};
};

/// Tenants are 0..T-1 with slices 0..K-1 each. Every slice draws from its
/// own stream seeded by (seed, tenant, slice), so a batch for T tenants is a
/// prefix of the batch for T+1 under the same seed.
RequestBatch generate_batch(int tenant_count, int slices_per_tenant, int vms_per_slice,
                            VlShape shape, std::uint64_t seed, const SliceParams& params = {});

double total_demand(const SliceRequest& slice, Resource r);
double total_demand(const RequestBatch& batch, Resource r);
/// Sum of requested VL rates (Kbps).
double total_rate(const SliceRequest& slice);
double total_rate(const RequestBatch& batch);

/// {slices:[{tenant, slice, vms:[{com_mhz, mem_gb, sto_gb}],
///           vls:[{a, b, rate_kbps, max_delay_ms}]}]}
RequestBatch load_batch_json(std::istream& in);
void write_batch_json(const RequestBatch& batch, std::ostream& out);

} // namespace slicenet
