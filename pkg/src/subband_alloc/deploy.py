"""Random factory deployments of wireless subnetworks.

A deployment snapshot places N access points uniformly in a rectangular
area with a minimum pairwise separation, then drops each subnetwork's
devices uniformly in an annulus around its AP.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

# attempts per AP before declaring the density infeasible
MAX_PLACEMENT_ATTEMPTS = 10_000


class PlacementFailure(Exception):
    """Rejection sampling could not satisfy the minimum AP separation."""


@dataclass
class ScenarioConfig:
    area_width_m: float = 40.0
    area_height_m: float = 25.0
    n_subnetworks: int = 50
    devices_per_subnetwork: int = 1
    subnetwork_radius_m: float = 2.5
    min_ap_separation_m: float = 2.5
    min_device_ap_distance_m: float = 1.0
    channel_profile: str = "InF-DL"
    seed: int = 0

    def __post_init__(self):
        if self.area_width_m <= 0 or self.area_height_m <= 0:
            raise ValueError("area dimensions must be positive")
        if self.n_subnetworks < 1:
            raise ValueError("n_subnetworks must be >= 1")
        if self.devices_per_subnetwork < 1:
            raise ValueError("devices_per_subnetwork must be >= 1")
        if not self.min_device_ap_distance_m < self.subnetwork_radius_m:
            raise ValueError("min_device_ap_distance_m must be < subnetwork_radius_m")

    @property
    def density_per_km2(self) -> float:
        area_km2 = (self.area_width_m / 1000.0) * (self.area_height_m / 1000.0)
        return self.n_subnetworks / area_km2


@dataclass
class DeploymentSnapshot:
    ap_positions: np.ndarray  # (N, 2) meters
    device_positions: np.ndarray  # (N, J, 2) meters

    @property
    def n_subnetworks(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def devices_per_subnetwork(self) -> int:
        return self.device_positions.shape[1]


def _place_aps(cfg, rng):
    lo = np.zeros(2)
    hi = np.array([cfg.area_width_m, cfg.area_height_m])
    positions = np.empty((cfg.n_subnetworks, 2))
    min_sep_sq = cfg.min_ap_separation_m ** 2
    for n in range(cfg.n_subnetworks):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            candidate = rng.uniform(lo, hi)
            if n == 0:
                positions[0] = candidate
                break
            d_sq = np.sum((positions[:n] - candidate) ** 2, axis=1)
            if np.all(d_sq >= min_sep_sq):
                positions[n] = candidate
                break
        else:
            raise PlacementFailure(
                f"could not place AP {n} after {MAX_PLACEMENT_ATTEMPTS} attempts "
                f"(N={cfg.n_subnetworks}, area {cfg.area_width_m}x{cfg.area_height_m} m, "
                f"min separation {cfg.min_ap_separation_m} m)"
            )
    return positions


def _place_devices(cfg, ap_positions, rng):
    n = cfg.n_subnetworks
    j = cfg.devices_per_subnetwork
    r_min = cfg.min_device_ap_distance_m
    r_max = cfg.subnetwork_radius_m
    devices = np.empty((n, j, 2))
    for i in range(n):
        for k in range(j):
            # uniform over the annulus: radius density proportional to r
            u = rng.uniform()
            radius = np.sqrt(u * (r_max ** 2 - r_min ** 2) + r_min ** 2)
            # keep the device inside the factory rectangle by resampling the angle
            for _ in range(MAX_PLACEMENT_ATTEMPTS):
                angle = rng.uniform(0.0, 2.0 * np.pi)
                pos = ap_positions[i] + radius * np.array([np.cos(angle), np.sin(angle)])
                if 0.0 <= pos[0] <= cfg.area_width_m and 0.0 <= pos[1] <= cfg.area_height_m:
                    devices[i, k] = pos
                    break
            else:  # pragma: no cover - radius < min(area dims) always leaves valid angles
                raise PlacementFailure(f"could not place device {k} of subnetwork {i}")
    return devices


def generate_snapshot(cfg: ScenarioConfig, seed: int) -> DeploymentSnapshot:
    """Draw one deployment realization; deterministic for a fixed seed.

    Separate RNG sub-streams are used for AP and device placement so that
    changing the device count does not perturb the AP layout.
    """
    ap_ss, dev_ss = np.random.SeedSequence(seed).spawn(2)
    ap_positions = _place_aps(cfg, np.random.default_rng(ap_ss))
    device_positions = _place_devices(cfg, ap_positions, np.random.default_rng(dev_ss))
    return DeploymentSnapshot(ap_positions=ap_positions, device_positions=device_positions)


def save_snapshot_csv(snapshot: DeploymentSnapshot, path) -> None:
    """One row per node: type {ap|dev}, subnetwork id, x, y."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["type", "subnetwork", "x", "y"])
        for n, (x, y) in enumerate(snapshot.ap_positions):
            writer.writerow(["ap", n, repr(float(x)), repr(float(y))])
        for n in range(snapshot.n_subnetworks):
            for x, y in snapshot.device_positions[n]:
                writer.writerow(["dev", n, repr(float(x)), repr(float(y))])


def load_snapshot_csv(path) -> DeploymentSnapshot:
    aps = {}
    devs = {}
    with open(path, newline="") as f:
        reader = csv.reader(f)
        next(reader)  # header
        for kind, n, x, y in reader:
            n = int(n)
            if kind == "ap":
                aps[n] = (float(x), float(y))
            else:
                devs.setdefault(n, []).append((float(x), float(y)))
    n_sub = len(aps)
    ap_positions = np.array([aps[n] for n in range(n_sub)])
    device_positions = np.array([devs[n] for n in range(n_sub)])
    return DeploymentSnapshot(ap_positions=ap_positions, device_positions=device_positions)
