"""Per-link channel gains for a deployment snapshot.

Large-scale gain = -(alpha-beta-gamma path loss) + spatially correlated
shadow fading, with the LOS/NLOS state drawn per link.  Small-scale fading
is complex Rayleigh.  The three parts are kept separable so the graph
module can build interference graphs from large-scale gains only.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

SHADOW_GRID_SPACING_M = 0.5
PATHLOSS_MIN_DISTANCE_M = 1.0  # floor to avoid the log singularity


@dataclass(frozen=True)
class ChannelProfile:
    name: str
    ple_los: float  # alpha, LOS
    ple_nlos: float  # alpha, NLOS
    beta_los_db: float
    beta_nlos_db: float
    gamma_f_los: float  # direct multiplier of log10(f_GHz), dB
    gamma_f_nlos: float
    sf_std_los_db: float
    sf_std_nlos_db: float
    clutter_density: float  # fraction in [0, 1], indoor-factory LOS model
    clutter_size_m: float
    corr_distance_m: float
    carrier_freq_ghz: float
    los_model: str  # "inf" (clutter-based) or "inh" (indoor office)
    # additional (alpha, beta, gamma_f) curves the NLOS path loss may not
    # drop below (TR 38.901 composes dense-clutter NLOS as a max with the
    # sparse-clutter curve); NLOS is always floored by the LOS curve too
    nlos_extra_bounds: tuple = ()


INF_DL = ChannelProfile(
    name="InF-DL",
    ple_los=2.15, ple_nlos=3.57,
    beta_los_db=31.84, beta_nlos_db=18.6,
    gamma_f_los=19.0, gamma_f_nlos=20.0,
    sf_std_los_db=4.0, sf_std_nlos_db=7.2,
    clutter_density=0.6, clutter_size_m=2.0,
    corr_distance_m=10.0, carrier_freq_ghz=28.0,
    los_model="inf",
    nlos_extra_bounds=((2.55, 33.0, 20.0),),  # sparse-clutter NLOS curve
)

INF_SL = ChannelProfile(
    name="InF-SL",
    ple_los=2.15, ple_nlos=2.55,
    beta_los_db=31.84, beta_nlos_db=33.0,
    gamma_f_los=19.0, gamma_f_nlos=20.0,
    sf_std_los_db=4.0, sf_std_nlos_db=5.7,
    clutter_density=0.35, clutter_size_m=10.0,
    corr_distance_m=10.0, carrier_freq_ghz=28.0,
    los_model="inf",
)

INH_OFFICE = ChannelProfile(
    name="InH-Office",
    ple_los=1.73, ple_nlos=3.83,
    beta_los_db=32.4, beta_nlos_db=17.3,
    gamma_f_los=20.0, gamma_f_nlos=24.9,
    sf_std_los_db=3.0, sf_std_nlos_db=8.03,
    clutter_density=0.0, clutter_size_m=0.0,
    corr_distance_m=6.0, carrier_freq_ghz=28.0,
    los_model="inh",
)

PROFILES = {p.name: p for p in (INF_DL, INF_SL, INH_OFFICE)}


@dataclass
class NoiseModel:
    total_bandwidth_hz: float = 20e6
    n_subbands: int = 5
    noise_figure_db: float = 10.0
    thermal_density_dbm_hz: float = -174.0

    @property
    def subband_noise_dbm(self) -> float:
        bw = self.total_bandwidth_hz / self.n_subbands
        return self.thermal_density_dbm_hz + 10.0 * np.log10(bw) + self.noise_figure_db

    @property
    def subband_noise_mw(self) -> float:
        return 10.0 ** (self.subband_noise_dbm / 10.0)


@dataclass
class LinkGains:
    """N x N link matrices; entry (n, m) is device of subnetwork m -> AP of n.

    The diagonal holds the desired links.  power_gain is always
    |fading|^2 * 10^(large_scale_db / 10), bit-exact.
    """

    large_scale_db: np.ndarray  # (N, N) dB, -pathloss + shadowing
    fading: np.ndarray  # (N, N) complex, unit variance
    power_gain: np.ndarray  # (N, N) linear
    los: np.ndarray  # (N, N) bool

    @property
    def n_subnetworks(self) -> int:
        return self.large_scale_db.shape[0]

    @property
    def large_scale_power(self) -> np.ndarray:
        return 10.0 ** (self.large_scale_db / 10.0)


def los_probability(d2d, profile: ChannelProfile):
    """LOS probability at 2-D distance d2d (meters); non-increasing in d2d."""
    d = np.asarray(d2d, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    if profile.los_model == "inf":
        k = -profile.clutter_size_m / np.log(1.0 - profile.clutter_density)
        p = np.exp(-d / k)
    elif profile.los_model == "inh":
        p = np.where(
            d <= 1.2,
            1.0,
            np.where(
                d < 6.5,
                np.exp(-(d - 1.2) / 4.7),
                np.exp(-(d - 6.5) / 32.9) * 0.32,
            ),
        )
    else:
        raise ValueError(f"unknown LOS model {profile.los_model!r}")
    return p if p.ndim else float(p)


def _abg_curve(d, alpha, beta, gamma_f, freq_ghz):
    return beta + 10.0 * alpha * np.log10(d) + gamma_f * np.log10(freq_ghz)


def pathloss_db(d3d, los, profile: ChannelProfile):
    """Alpha-beta-gamma path loss; distances are clamped to 1 m from below.

    NLOS links take the maximum of the LOS curve, the profile's own NLOS
    curve, and any extra lower-bound curves, following the TR 38.901
    composition (a blocked path is never better than a clear one).
    """
    d = np.maximum(np.asarray(d3d, dtype=np.float64), PATHLOSS_MIN_DISTANCE_M)
    los = np.asarray(los, dtype=bool)
    f = profile.carrier_freq_ghz
    pl_los = _abg_curve(d, profile.ple_los, profile.beta_los_db, profile.gamma_f_los, f)
    pl_nlos = _abg_curve(d, profile.ple_nlos, profile.beta_nlos_db, profile.gamma_f_nlos, f)
    pl_nlos = np.maximum(pl_nlos, pl_los)
    for alpha, beta, gamma_f in profile.nlos_extra_bounds:
        pl_nlos = np.maximum(pl_nlos, _abg_curve(d, alpha, beta, gamma_f, f))
    pl = np.where(los, pl_los, pl_nlos)
    return pl if pl.ndim else float(pl)


# Cholesky factors of the grid covariance, cached per (nx, ny, corr) since
# the factorization is the expensive part (seconds for the largest area).
_FIELD_CACHE = {}


def _grid_field_factor(width_m, height_m, corr_distance_m):
    nx = int(np.floor(width_m / SHADOW_GRID_SPACING_M)) + 1
    ny = int(np.floor(height_m / SHADOW_GRID_SPACING_M)) + 1
    key = (nx, ny, round(float(corr_distance_m), 6))
    if key in _FIELD_CACHE:
        return _FIELD_CACHE[key]
    xs = np.arange(nx) * SHADOW_GRID_SPACING_M
    ys = np.arange(ny) * SHADOW_GRID_SPACING_M
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    if corr_distance_m <= 0:
        factor = None  # i.i.d. field
    else:
        # build in place: the matrix is ~2 GB for the largest swept area
        cov = cdist(pts, pts)
        cov *= -1.0 / corr_distance_m
        np.exp(cov, out=cov)
        cov[np.diag_indices_from(cov)] += 1e-9
        # factor the transpose view: it is Fortran-contiguous (and equal, by
        # symmetry), so LAPACK works in place instead of copying the matrix
        factor = scipy.linalg.cholesky(cov.T, lower=True, overwrite_a=True,
                                       check_finite=False)
    _FIELD_CACHE[key] = (nx, ny, factor)
    return _FIELD_CACHE[key]


def _grid_index(positions, nx, ny):
    ix = np.clip(np.rint(positions[:, 0] / SHADOW_GRID_SPACING_M).astype(int), 0, nx - 1)
    iy = np.clip(np.rint(positions[:, 1] / SHADOW_GRID_SPACING_M).astype(int), 0, ny - 1)
    return ix * ny + iy


def _shadow_field(snapshot, profile, rng, los=None, area=None):
    """Unit-variance correlated field at each device, scaled to per-link std."""
    devices = snapshot.device_positions[:, 0, :]
    aps = snapshot.ap_positions
    if area is None:
        all_pts = np.vstack([devices, aps])
        width = float(all_pts[:, 0].max())
        height = float(all_pts[:, 1].max())
    else:
        width, height = area
    nx, ny, factor = _grid_field_factor(width, height, profile.corr_distance_m)
    z = rng.standard_normal(nx * ny)
    field = z if factor is None else factor @ z
    values = field[_grid_index(devices, nx, ny)]  # (N,)
    n = snapshot.n_subnetworks
    base = np.broadcast_to(values, (n, n)).copy()  # link (n, m) uses device m's field
    if los is None:
        std = profile.sf_std_nlos_db
    else:
        std = np.where(los, profile.sf_std_los_db, profile.sf_std_nlos_db)
    return std * base


def sample_shadow_field(snapshot, profile: ChannelProfile, seed: int, los=None, area=None):
    """Per-link shadowing (dB), zero-mean Gaussian with exponential spatial
    correlation of the underlying field.  los, if given, selects the LOS or
    NLOS standard deviation per link; otherwise the NLOS std is used."""
    return _shadow_field(snapshot, profile, np.random.default_rng(seed), los=los, area=area)


def realize_gains(snapshot, profile: ChannelProfile, noise: NoiseModel, seed: int,
                  include_fading: bool = True, area=None) -> LinkGains:
    """Draw LOS states, path loss, shadowing and Rayleigh fading for every
    device->AP link, from independent RNG sub-streams of the given seed."""
    los_ss, shadow_ss, fading_ss = np.random.SeedSequence(seed).spawn(3)
    devices = snapshot.device_positions[:, 0, :]
    aps = snapshot.ap_positions
    # d[n, m] = distance from device of subnetwork m to AP of subnetwork n
    d = cdist(aps, devices)

    los_rng = np.random.default_rng(los_ss)
    los = los_rng.random(d.shape) < los_probability(d, profile)

    pl = pathloss_db(d, los, profile)
    s = _shadow_field(snapshot, profile, np.random.default_rng(shadow_ss), los=los, area=area)
    large_scale_db = -pl + s

    if include_fading:
        fading_rng = np.random.default_rng(fading_ss)
        h = (fading_rng.standard_normal(d.shape) + 1j * fading_rng.standard_normal(d.shape)) / np.sqrt(2.0)
    else:
        h = np.ones(d.shape, dtype=complex)

    power_gain = np.abs(h) ** 2 * 10.0 ** (large_scale_db / 10.0)
    return LinkGains(large_scale_db=large_scale_db, fading=h, power_gain=power_gain, los=los)


def export_gains_csv(gains: LinkGains, path) -> None:
    """Flat CSV dump of the link matrices for external cross-checks."""
    n = gains.n_subnetworks
    with open(path, "w") as f:
        f.write("rx_subnetwork,tx_subnetwork,large_scale_db,fading_re,fading_im,power_gain,los\n")
        for i in range(n):
            for j in range(n):
                h = gains.fading[i, j]
                f.write(f"{i},{j},{float(gains.large_scale_db[i, j])!r},"
                        f"{float(h.real)!r},{float(h.imag)!r},"
                        f"{float(gains.power_gain[i, j])!r},{int(gains.los[i, j])}\n")
