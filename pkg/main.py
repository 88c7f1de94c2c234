import sys
import argparse
import traceback
from dataclasses import asdict
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

# Load .env FIRST (before any other imports)
from utils.env_loader import env_loader

from utils.logger import logger, add_file_handler, set_console_level
from utils.config_loader import load_config, load_yaml_document
from utils.exceptions import BootstrapTestError, ConfigError, IncompatiblePair
from utils import data_io
from methods.bootstrap_test import BootstrapTest
from methods.simulation import (
    Combo,
    StudyConfig,
    compare_combos,
    plot_tables,
    pvalue_calibration,
    run_study,
)
from modules.functionals import StatisticVariant, TestKind
from modules.resampling import SchemeKind
from modules.estimators import EstimatorChoice
from models.families import FAMILIES, get_family

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INCOMPATIBLE = 4


def setup_directories(config):
    """Create output and log directories"""
    paths = config.get('paths', {})
    for dir_path in (paths.get('output_dir', 'output'), paths.get('log_dir', 'logs')):
        Path(dir_path).mkdir(parents=True, exist_ok=True)


def setup_logging(args, config):
    if args.verbose:
        set_console_level('DEBUG')
    elif args.quiet:
        set_console_level('WARNING')
    logging_config = config.get('logging', {})
    if logging_config.get('file_logging', False):
        add_file_handler(config.get('paths', {}).get('log_dir', 'logs'))


def resolve_workers(args, config):
    return env_loader.get_worker_count(
        cli_value=getattr(args, 'workers', None),
        config_value=config.get('simulation', {}).get('workers', 1),
    )


def cmd_test(args, config):
    """Run one bootstrap test on a data file"""
    test = TestKind(args.test)
    engine = BootstrapTest(config)
    family = get_family(args.family) if args.family else None
    if test is TestKind.GOF and family is None:
        family = get_family('normal_location')
    if test is TestKind.COPULA and family is None:
        family = get_family('clayton')

    spec = engine.build_spec(
        test=test, scheme=args.scheme, statistic=args.statistic, estimator=args.estimator,
        family=family, norm=args.norm, B=args.B, alpha=args.alpha, seed=args.seed,
        allow_invalid=True if args.allow_invalid else None,
    )
    sample = data_io.load_sample(args.data, test.is_bivariate)
    result = engine.run(spec, sample, workers=resolve_workers(args, config),
                        verbose=not args.quiet)

    description = {**spec.describe(), "data": str(args.data), "n": sample.n}
    effective = {**description, "options": asdict(spec.options)}
    output = args.output or Path(config.get('paths', {}).get('output_dir', 'output')) / 'test_result.json'
    data_io.write_result_document(output, result, description, effective, spec.master_seed)

    decision = "reject H0" if result.reject else "do not reject H0"
    print(f"T_n = {result.t_obs:.6f}, p = {result.p_value:.6f} (B={spec.B}), "
          f"alpha = {spec.alpha}: {decision}")
    return EXIT_OK


def load_study(args, config):
    doc = load_yaml_document(args.study)
    if args.allow_invalid:
        doc = {**doc, 'allow_invalid': True}
    return StudyConfig.from_dict(doc, config)


def cmd_simulate(args, config):
    """Run a study document and write its rate table"""
    study = load_study(args, config)
    workers = resolve_workers(args, config)
    logger.info(f"Study '{study.name}': {len(study.cells())} cell(s), "
                f"N={study.n_sims}, B={study.B}, seed={study.seed}")

    record = args.pvalues_output is not None
    outcome = run_study(study, workers=workers, record_pvalues=record)
    rows, pvalues = outcome if record else (outcome, None)

    output = args.output or Path(config.get('paths', {}).get('output_dir', 'output')) / f"{study.name}.csv"
    data_io.write_study_table(output, rows, study.to_dict(), study.seed)
    if record:
        data_io.write_frame(args.pvalues_output, pvalues)
        keys = ["dgp", "n", "scheme", "statistic", "estimator"]
        for key, part in pvalues.groupby(keys, sort=False):
            check = pvalue_calibration(part["p_value"], study.B)
            status = "ok" if check["ok"].all() else "exceeds bound"
            logger.info(f"  p-value calibration {key}: {status}")

    print(f"Wrote {len(rows)} rows to {output}")
    return EXIT_OK


def cmd_compare(args, config):
    """Compare two combos on one DGP with a two-proportion test"""
    test = TestKind(args.test)
    doc = {
        'test': test.value,
        'dgps': [args.dgp],
        'sample_sizes': [args.n],
        'combos': [args.first, args.second],
        'n_sims': args.n_sims,
        'allow_invalid': bool(args.allow_invalid),
    }
    for key, value in (('B', args.B), ('alpha', args.alpha), ('seed', args.seed),
                       ('family', args.family), ('norm', args.norm)):
        if value is not None:
            doc[key] = value
    study = StudyConfig.from_dict(doc, config)
    first, second = (Combo.parse(c, test) for c in (args.first, args.second))

    outcome = compare_combos(study, first, second, workers=resolve_workers(args, config))
    for row in outcome["rows"]:
        print(f"{row.combo_id}: {row.rejections}/{row.nsims} = {row.rate:.4f} "
              f"[{row.ci_lo:.4f}, {row.ci_hi:.4f}]")
    print(f"two-proportion p-value: {outcome['p_value']:.4g}")
    return EXIT_OK


def cmd_plot_table(args, config):
    """Pivot a study table into n x combo rate tables, one per DGP"""
    frame = data_io.read_study_table(args.input)
    default_dir = Path(config.get('paths', {}).get('output_dir', 'output')) / 'plot_tables'
    out_dir = Path(args.output_dir) if args.output_dir else default_dir
    stem = Path(args.input).stem
    for dgp, table in plot_tables(frame).items():
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in dgp)
        data_io.write_frame(out_dir / f"{stem}_{safe}.csv", table, index=True)
    print(f"Plot tables written to {out_dir}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        description='Bootstrap hypothesis tests with a general resampling scheme',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Independence test with the product-of-marginals bootstrap
  python main.py test --data pairs.csv --test independence \\
    --scheme independence_product --statistic equivalent

  # Goodness of fit to N(mu, 1) with the parametric bootstrap
  python main.py test --data x.csv --test gof --scheme parametric_null --statistic equivalent

  # Power study
  python main.py simulate --study config/studies/independence_power.yaml --workers 4

  # Compare two combinations
  python main.py compare --test independence --dgp regression_normal:b=1 -n 20 --n-sims 2000 \\
    --first empirical+centred --second independence_product+equivalent
        """
    )
    parser.add_argument('--config', '-c', type=str, default=None,
                        help='Path to tool configuration (default: config/config.yaml)')
    parser.add_argument('--verbose', action='store_true', help='Debug output on the console')
    parser.add_argument('--quiet', action='store_true', help='Warnings only on the console')
    sub = parser.add_subparsers(dest='command', required=True)

    tests = [t.value for t in TestKind]
    schemes = [s.value for s in SchemeKind]
    statistics = [s.value for s in StatisticVariant]
    estimators = [e.value for e in EstimatorChoice]

    p_test = sub.add_parser('test', help='Run one bootstrap test on a data file')
    p_test.add_argument('--data', '-d', required=True, help='Headered CSV (1 or 2 columns)')
    p_test.add_argument('--test', '-t', required=True, choices=tests)
    p_test.add_argument('--scheme', required=True, choices=schemes)
    p_test.add_argument('--statistic', required=True, choices=statistics)
    p_test.add_argument('--estimator', choices=estimators, default=None)
    p_test.add_argument('--family', choices=sorted(FAMILIES), default=None)
    p_test.add_argument('--norm', choices=['sup', 'l2'], default=None)
    p_test.add_argument('-B', type=int, default=None, help='Bootstrap replicates')
    p_test.add_argument('--alpha', type=float, default=None)
    p_test.add_argument('--seed', type=int, default=None)
    p_test.add_argument('--output', '-o', default=None, help='Result JSON path')
    p_test.add_argument('--workers', '-w', type=int, default=None)
    p_test.add_argument('--allow-invalid', action='store_true',
                        help='Run combinations known not to give a consistent test')
    p_test.set_defaults(handler=cmd_test)

    p_sim = sub.add_parser('simulate', help='Run a level/power study')
    p_sim.add_argument('--study', '-s', required=True, help='Study document (YAML)')
    p_sim.add_argument('--output', '-o', default=None, help='Study CSV path')
    p_sim.add_argument('--pvalues-output', default=None,
                       help='Also write one p-value per simulation to this CSV')
    p_sim.add_argument('--workers', '-w', type=int, default=None)
    p_sim.add_argument('--allow-invalid', action='store_true')
    p_sim.set_defaults(handler=cmd_simulate)

    p_cmp = sub.add_parser('compare', help='Compare two combinations on one DGP')
    p_cmp.add_argument('--test', '-t', required=True, choices=tests)
    p_cmp.add_argument('--dgp', required=True, help="e.g. 'regression_normal:b=1'")
    p_cmp.add_argument('-n', type=int, required=True, help='Sample size')
    p_cmp.add_argument('--n-sims', type=int, required=True)
    p_cmp.add_argument('--first', required=True, help='scheme+statistic[+estimator]')
    p_cmp.add_argument('--second', required=True, help='scheme+statistic[+estimator]')
    p_cmp.add_argument('--family', choices=sorted(FAMILIES), default=None)
    p_cmp.add_argument('--norm', choices=['sup', 'l2'], default=None)
    p_cmp.add_argument('-B', type=int, default=None)
    p_cmp.add_argument('--alpha', type=float, default=None)
    p_cmp.add_argument('--seed', type=int, default=None)
    p_cmp.add_argument('--workers', '-w', type=int, default=None)
    p_cmp.add_argument('--allow-invalid', action='store_true')
    p_cmp.set_defaults(handler=cmd_compare)

    p_plot = sub.add_parser('plot-table', help='Pivot a study CSV into n x combo tables')
    p_plot.add_argument('--input', '-i', required=True, help='Study CSV from simulate')
    p_plot.add_argument('--output-dir', default=None)
    p_plot.set_defaults(handler=cmd_plot_table)
    return parser


def main(argv=None):
    """Parse arguments, dispatch, and map errors to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        setup_logging(args, config)
        setup_directories(config)
        return args.handler(args, config)

    except IncompatiblePair as e:
        logger.error(f"Incompatible combination: {e}")
        return EXIT_INCOMPATIBLE
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    except BootstrapTestError as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except ValueError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Fatal error in main: {str(e)}")
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
