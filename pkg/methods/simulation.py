"""
Monte Carlo level and power studies

A study sweeps DGPs x sample sizes x (scheme, statistic, estimator) combos.
Every simulation has its own seed derived from (study seed, cell index,
simulation index): the data come from stream 0 of that seed and bootstrap
replicate b from stream b, so any cell can be rerun on its own.
"""
import hashlib
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import beta, chi2_contingency
from tqdm import tqdm

from methods.bootstrap_test import EngineOptions, TestSpec, run_test
from methods.validity import DEFAULT_ESTIMATORS
from models.families import get_family
from modules.data_generator import DGPSpec, generate
from modules.empirical import NormKind
from modules.estimators import EstimatorChoice
from modules.functionals import FunctionalSpec, StatisticVariant, TestKind
from modules.resampling import SchemeKind
from utils.exceptions import ConfigError, EmptyInput
from utils.logger import logger
from utils.rng import MASK64, RngStream, derive_seed

SCHEMA_VERSION = 1
STUDY_KEYS = frozenset({
    'schema_version', 'name', 'description', 'test', 'family', 'norm', 'dgps',
    'sample_sizes', 'combos', 'n_sims', 'B', 'alpha', 'seed', 'ci_confidence',
    'allow_invalid',
})
COMBO_KEYS = frozenset({'scheme', 'statistic', 'estimator'})
DATA_STREAM = 0


# ---------------------------------------------------------------------------
# Binomial summaries
# ---------------------------------------------------------------------------

def clopper_pearson_ci(k, N, confidence=0.95):
    """
    Exact binomial interval from beta quantiles

    Args:
        k: Number of successes, 0 <= k <= N
        N: Number of trials
        confidence: Two-sided coverage

    Returns:
        (lo, hi)
    """
    if N < 1 or not 0 <= k <= N:
        raise ValueError(f"Need 0 <= k <= N and N >= 1, got k={k}, N={N}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    tail = (1.0 - confidence) / 2.0
    lo = 0.0 if k == 0 else float(beta.ppf(tail, k, N - k + 1))
    hi = 1.0 if k == N else float(beta.ppf(1.0 - tail, k + 1, N - k))
    return lo, hi


def two_proportion_test(k1, N1, k2, N2):
    """
    Two-sided chi-square test of equal proportions with Yates' continuity correction

    Returns:
        p-value

    Raises:
        EmptyInput: N1 == 0 or N2 == 0
    """
    if N1 <= 0 or N2 <= 0:
        raise EmptyInput("Both groups need at least one trial")
    if not (0 <= k1 <= N1 and 0 <= k2 <= N2):
        raise ValueError(f"Counts out of range: {k1}/{N1}, {k2}/{N2}")
    pooled = k1 + k2
    if pooled == 0 or pooled == N1 + N2:
        # no variation at all: the statistic is 0
        return 1.0
    table = np.array([[k1, N1 - k1], [k2, N2 - k2]])
    _, p_value, _, _ = chi2_contingency(table, correction=True)
    return float(p_value)


def pvalue_calibration(pvalues, B, deciles=None):
    """
    Compare the empirical CDF of null p-values with the uniform

    Each decile d gets the bound d + 1/(B + 1) + 3 * sqrt(d (1 - d) / N).

    Returns:
        DataFrame with columns decile, ecdf, bound, ok
    """
    p = np.asarray(pvalues, dtype=float)
    if p.size == 0:
        raise EmptyInput("pvalue_calibration needs p-values")
    d = np.arange(1, 10) / 10.0 if deciles is None else np.asarray(deciles, dtype=float)
    ecdf = np.array([np.mean(p <= level) for level in d])
    bound = d + 1.0 / (B + 1) + 3.0 * np.sqrt(d * (1.0 - d) / p.size)
    return pd.DataFrame({"decile": d, "ecdf": ecdf, "bound": bound, "ok": ecdf <= bound})


# ---------------------------------------------------------------------------
# Study configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Combo:
    scheme: SchemeKind
    statistic: StatisticVariant
    estimator: EstimatorChoice

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", SchemeKind(self.scheme))
            object.__setattr__(self, "statistic", StatisticVariant(self.statistic))
            object.__setattr__(self, "estimator", EstimatorChoice(self.estimator))
        except ValueError as e:
            raise ConfigError(str(e)) from None

    @property
    def combo_id(self):
        return f"{self.scheme.value}+{self.statistic.value}+{self.estimator.value}"

    @classmethod
    def parse(cls, entry, test):
        """From a mapping or a 'scheme+statistic[+estimator]' descriptor"""
        test = TestKind(test)
        if isinstance(entry, str):
            parts = [p.strip() for p in entry.split("+")]
            if len(parts) not in (2, 3):
                raise ConfigError(f"Combo '{entry}' must read scheme+statistic[+estimator]")
            entry = dict(zip(("scheme", "statistic", "estimator"), parts))
        if not isinstance(entry, dict):
            raise ConfigError(f"Combo entry must be a mapping: {entry!r}")
        unknown = set(entry) - COMBO_KEYS
        if unknown:
            raise ConfigError(f"Unknown combo key(s) {sorted(unknown)}")
        if 'scheme' not in entry or 'statistic' not in entry:
            raise ConfigError(f"Combo needs scheme and statistic: {entry!r}")
        return cls(entry['scheme'], entry['statistic'],
                   entry.get('estimator', DEFAULT_ESTIMATORS[test]))


def _positive_int(doc, key, default):
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"'{key}' must be an integer >= 1, got {value!r}")
    return int(value)


def _unit_interval(doc, key, default):
    value = doc.get(key, default)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a number, got {value!r}") from None
    if not 0.0 < value < 1.0:
        raise ConfigError(f"'{key}' must be in (0, 1), got {value}")
    return value


@dataclass(frozen=True)
class StudyConfig:
    """A validated study document"""

    test: TestKind
    dgps: tuple
    sample_sizes: tuple
    combos: tuple
    n_sims: int = 200
    B: int = 100
    alpha: float = 0.05
    seed: int = 0
    ci_confidence: float = 0.95
    family: str = None
    norm: str = None
    allow_invalid: bool = False
    name: str = "study"
    options: EngineOptions = field(default_factory=EngineOptions)

    @classmethod
    def from_dict(cls, doc, defaults=None):
        """
        Validate a study document

        Args:
            doc: Parsed YAML mapping
            defaults: Tool config (simulation / engine / estimation / norms sections)

        Raises:
            ConfigError: unknown keys, wrong schema version, missing or invalid fields
            IncompatiblePair: a combo that cannot or should not run
        """
        defaults = defaults or {}
        sim_defaults = defaults.get('simulation', {})
        engine_defaults = defaults.get('engine', {})

        unknown = set(doc) - STUDY_KEYS
        if unknown:
            raise ConfigError(f"Unknown study key(s): {sorted(unknown)}")
        version = doc.get('schema_version', SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")

        try:
            test = TestKind(doc.get('test', 'slope'))
        except ValueError as e:
            raise ConfigError(str(e)) from None

        dgps = doc.get('dgps') or []
        if not isinstance(dgps, list) or not dgps:
            raise ConfigError("'dgps' must be a nonempty list")
        dgps = tuple(DGPSpec.from_descriptor(d) if isinstance(d, str) else DGPSpec.from_dict(d)
                     for d in dgps)
        for dgp in dgps:
            if dgp.bivariate != test.is_bivariate:
                raise ConfigError(f"DGP '{dgp.name}' does not produce data for a '{test.value}' test")

        sizes = doc.get('sample_sizes') or []
        if not isinstance(sizes, list) or not sizes:
            raise ConfigError("'sample_sizes' must be a nonempty list")
        for n in sizes:
            if isinstance(n, bool) or not isinstance(n, int) or n < 2:
                raise ConfigError(f"Sample sizes must be integers >= 2, got {n!r}")

        combos = doc.get('combos') or []
        if not isinstance(combos, list) or not combos:
            raise ConfigError("'combos' must be a nonempty list")
        combos = tuple(Combo.parse(c, test) for c in combos)

        family = doc.get('family')
        norm = doc.get('norm')
        if test in (TestKind.GOF, TestKind.COPULA):
            family = family or ('normal_location' if test is TestKind.GOF else 'clayton')
            norm = norm or engine_defaults.get('default_norm', 'sup')
            get_family(family)
            try:
                NormKind(norm)
            except ValueError:
                raise ConfigError(f"Unknown norm '{norm}' (use sup or l2)") from None
        elif family is not None or norm is not None:
            raise ConfigError(f"A '{test.value}' study takes no family or norm")

        seed = doc.get('seed', engine_defaults.get('seed', 0))
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
            raise ConfigError(f"'seed' must be an integer in [0, 2^64), got {seed!r}")

        config = cls(
            test=test,
            dgps=dgps,
            sample_sizes=tuple(sizes),
            combos=combos,
            n_sims=_positive_int(doc, 'n_sims', sim_defaults.get('n_sims', 200)),
            B=_positive_int(doc, 'B', engine_defaults.get('B', 100)),
            alpha=_unit_interval(doc, 'alpha', engine_defaults.get('alpha', 0.05)),
            seed=seed,
            ci_confidence=_unit_interval(doc, 'ci_confidence',
                                         sim_defaults.get('ci_confidence', 0.95)),
            family=family,
            norm=norm,
            allow_invalid=bool(doc.get('allow_invalid', False)),
            name=str(doc.get('name', 'study')),
            options=EngineOptions.from_config(defaults),
        )
        for combo in combos:
            config.test_spec(combo, 0)
        return config

    def functional(self):
        family = get_family(self.family) if self.family else None
        return FunctionalSpec(self.test, family, self.norm)

    def test_spec(self, combo, seed):
        return TestSpec(
            functional=self.functional(),
            scheme=combo.scheme,
            statistic=combo.statistic,
            estimator=combo.estimator,
            B=self.B,
            alpha=self.alpha,
            master_seed=seed,
            allow_invalid=self.allow_invalid,
            options=self.options,
        )

    def cells(self):
        """(cell index, dgp, n, combo) in (dgp, n, combo) order"""
        out = []
        for dgp in self.dgps:
            for n in self.sample_sizes:
                for combo in self.combos:
                    out.append((len(out), dgp, n, combo))
        return out

    def to_dict(self):
        """Canonical form used for the config digest"""
        doc = {
            "schema_version": SCHEMA_VERSION,
            "test": self.test.value,
            "dgps": [d.dgp_id for d in self.dgps],
            "sample_sizes": list(self.sample_sizes),
            "combos": [c.combo_id for c in self.combos],
            "n_sims": self.n_sims,
            "B": self.B,
            "alpha": self.alpha,
            "seed": self.seed,
            "ci_confidence": self.ci_confidence,
            "family": self.family,
            "norm": self.norm,
            "allow_invalid": self.allow_invalid,
            "options": asdict(self.options),
        }
        return doc


@dataclass(frozen=True)
class StudyRow:
    dgp: str
    n: int
    scheme: str
    statistic: str
    estimator: str
    rejections: int
    nsims: int
    rate: float
    ci_lo: float
    ci_hi: float

    @property
    def combo_id(self):
        return f"{self.scheme}+{self.statistic}+{self.estimator}"

    def to_record(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def simulation_seed(study_seed, cell_index, sim_index):
    return derive_seed(study_seed, cell_index, sim_index)


def run_simulation(config, cell_index, dgp, n, combo, sim_index):
    """
    One simulated data set and its bootstrap test

    Returns:
        (reject, p_value)
    """
    seed = simulation_seed(config.seed, cell_index, sim_index)
    sample = generate(dgp, n, RngStream(seed, DATA_STREAM))
    result = run_test(config.test_spec(combo, seed), sample)
    return result.reject, result.p_value


def _run_block(config, cell_index, dgp, n, combo, sim_indices):
    try:
        return [run_simulation(config, cell_index, dgp, n, combo, int(s)) for s in sim_indices]
    except Exception as e:
        logger.error(f"Simulation failed in cell {cell_index} ({dgp.dgp_id}, n={n}, "
                     f"{combo.combo_id}): {e}")
        raise


def _summarise(config, dgp, n, combo, outcomes):
    rejections = int(sum(1 for reject, _ in outcomes if reject))
    lo, hi = clopper_pearson_ci(rejections, config.n_sims, config.ci_confidence)
    return StudyRow(
        dgp=dgp.dgp_id, n=int(n), scheme=combo.scheme.value,
        statistic=combo.statistic.value, estimator=combo.estimator.value,
        rejections=rejections, nsims=config.n_sims,
        rate=rejections / config.n_sims, ci_lo=lo, ci_hi=hi,
    )


def run_cell(config, cell_index, dgp, n, combo):
    """Rerun a single cell in isolation; reproduces its row of run_study"""
    outcomes = _run_block(config, cell_index, dgp, n, combo, range(config.n_sims))
    return _summarise(config, dgp, n, combo, outcomes)


def _pvalue_records(dgp, n, combo, outcomes):
    return [
        {"dgp": dgp.dgp_id, "n": int(n), "scheme": combo.scheme.value,
         "statistic": combo.statistic.value, "estimator": combo.estimator.value,
         "sim": i, "p_value": p, "reject": bool(reject)}
        for i, (reject, p) in enumerate(outcomes)
    ]


def run_study(config, workers=1, record_pvalues=False, blocks_per_cell=None):
    """
    Run every cell of a study

    Args:
        config: StudyConfig
        workers: Worker processes
        record_pvalues: Also return one record per simulation
        blocks_per_cell: Split each cell's simulations into this many tasks
            (defaults to the worker count)

    Returns:
        list of StudyRow, or (rows, p-value DataFrame) with record_pvalues
    """
    cells = config.cells()
    blocks_per_cell = max(1, blocks_per_cell or workers)
    tasks = []
    for cell_index, dgp, n, combo in cells:
        for block in np.array_split(np.arange(config.n_sims), blocks_per_cell):
            if block.size:
                tasks.append((cell_index, dgp, n, combo, block))

    logger.info(f"[Stage 1/2] Running {len(cells)} cell(s) x {config.n_sims} simulations "
                f"(B={config.B}, workers={workers})")
    if workers > 1:
        results = Parallel(n_jobs=workers, return_as="generator")(
            delayed(_run_block)(config, *task) for task in tasks
        )
    else:
        results = (_run_block(config, *task) for task in tasks)

    by_cell = {index: [] for index, *_ in cells}
    for task, block_result in zip(tasks, tqdm(results, total=len(tasks), desc="Simulating")):
        by_cell[task[0]].extend(block_result)

    logger.info("[Stage 2/2] Summarising rejection rates")
    rows = []
    records = []
    for cell_index, dgp, n, combo in cells:
        outcomes = by_cell[cell_index]
        row = _summarise(config, dgp, n, combo, outcomes)
        logger.info(f"  {row.dgp} n={row.n} {row.combo_id}: "
                    f"{row.rejections}/{row.nsims} = {row.rate:.3f} "
                    f"[{row.ci_lo:.3f}, {row.ci_hi:.3f}]")
        rows.append(row)
        if record_pvalues:
            records.extend(_pvalue_records(dgp, n, combo, outcomes))

    if record_pvalues:
        return rows, pd.DataFrame.from_records(records)
    return rows


def compare_combos(config, first, second, workers=1):
    """
    Run two combos on the same DGP / n with independent seed branches

    The branch seed is derived from the study seed and a stable digest of
    the combo id, so identical combos give identical rates.

    Returns:
        dict with both rows and the two-proportion p-value
    """
    rows = []
    for combo in (first, second):
        config.test_spec(combo, 0)
        branch_config = replace(config, dgps=config.dgps[:1], sample_sizes=config.sample_sizes[:1],
                                combos=(combo,), seed=_combo_branch_seed(config.seed, combo))
        rows.extend(run_study(branch_config, workers=workers))
    a, b = rows
    p_value = two_proportion_test(a.rejections, a.nsims, b.rejections, b.nsims)
    return {"rows": rows, "p_value": p_value}


def _combo_branch_seed(seed, combo):
    digest = int.from_bytes(hashlib.sha256(combo.combo_id.encode("utf-8")).digest()[:8], "big")
    return derive_seed(seed, digest)


def plot_tables(frame):
    """
    Pivot a study table into one n x combo rate table per DGP

    Args:
        frame: DataFrame with the study CSV columns

    Returns:
        dict dgp -> DataFrame (index n, one column per combo)
    """
    frame = frame.copy()
    frame["combo"] = frame["scheme"] + "+" + frame["statistic"] + "+" + frame["estimator"]
    tables = {}
    for dgp, part in frame.groupby("dgp", sort=False):
        combos = list(dict.fromkeys(part["combo"]))
        table = part.pivot_table(index="n", columns="combo", values="rate", aggfunc="first")
        tables[dgp] = table[combos].sort_index()
    return tables
