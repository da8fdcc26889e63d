#!/usr/bin/env python3
"""
Orthogonal NMF Benchmark Tool
Command-line interface for generating datasets, running solves and sweeping benchmarks.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.models.errors import ConfigError
from src.models.solver_config import load_harness_settings
from src.services.factorization_commands import FactorizationCommands


class OrthoFactRunner:
    """Command-line front end for FactorizationCommands."""

    def __init__(self, verbose: bool = False):
        """
        Initialize the runner.

        Args:
            verbose: If True, log at INFO level regardless of ORTHOFACT_LOG_LEVEL
        """
        self.settings = load_harness_settings()
        level = logging.INFO if verbose else getattr(logging, self.settings.log_level.upper(), logging.WARNING)
        logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
        self.commands = FactorizationCommands(self.settings)

    def generate(self, args) -> dict:
        """Write dataset instance files."""
        print("\nGenerating instances:")
        print(f"  Kinds: {', '.join(args.kind) if args.kind else 'UNION, BION'}")
        print(f"  Master seed: {args.seed if args.seed is not None else self.settings.master_seed}")

        result = self.commands.execute_command(
            action='generate',
            kinds=args.kind,
            ns=args.n,
            k_fractions=args.k_frac,
            replicates=args.replicates,
            master_seed=args.seed,
            out=args.out
        )
        self._print_result(result)
        if result.get('success'):
            print(f"  Triples: {result['triples']} ({result['files']} files)")
            print(f"  Directory: {result['output_dir']}")
        return result

    def solve(self, args) -> dict:
        """Run one solve and print its report as a JSON line."""
        result = self.commands.execute_command(
            action='solve',
            instance=args.instance,
            alg=args.alg,
            p=args.p,
            p_frac=args.p_frac,
            beta=args.beta,
            alpha=args.alpha,
            seed=args.seed,
            config=args.config,
            time_limit=args.time_limit,
            max_iters=args.max_iters,
            trace=args.trace
        )
        if result.get('success'):
            print(result['json'])
            if 'trace_file' in result:
                print(f"  Trace: {result['trace_file']}", file=sys.stderr)
        else:
            self._print_result(result)
        return result

    def benchmark(self, args) -> dict:
        """Sweep a grid and write the CSV reports."""
        print("\nRunning benchmark:")
        print(f"  Kinds: {', '.join(args.kind) if args.kind else 'UNION'}")
        print(f"  Algorithms: {', '.join(args.alg) if args.alg is not None else 'ding, mirzal, pg'}")

        result = self.commands.execute_command(
            action='benchmark',
            kinds=args.kind,
            ns=args.n,
            k_fractions=args.k_frac,
            p_fractions=args.p_frac,
            betas=args.beta,
            algorithms=args.alg,
            replicates=args.replicates,
            master_seed=args.seed,
            config=args.config,
            time_limit=args.time_limit,
            max_iters=args.max_iters,
            workers=args.workers,
            out=args.out
        )
        self._print_result(result)
        if result.get('success'):
            print(f"  Rows: {result['rows']} ({result['errors']} failed)")
            for name, path in result['files'].items():
                print(f"  {name}: {path}")
            print("\nMean RSE:")
            print(result['summary'])
        return result

    def report(self, args) -> dict:
        """Write plot data from a raw benchmark CSV."""
        result = self.commands.execute_command(action='report', raw_csv=args.raw_csv, out=args.out)
        self._print_result(result)
        if result.get('success'):
            print(f"  {len(result['files'])} plot-data files in {result['output_dir']}")
        return result

    def _print_result(self, result: dict):
        """Print command result."""
        print("\nResult:")
        if result.get('success'):
            print("  ✓ SUCCESS")
        else:
            print("  ✗ FAILED")
            if 'error' in result:
                print(f"  Error: {result['error']}")


def _algorithms(value: str) -> List[str]:
    # "--alg ''" gives an empty list, which the grid rejects
    return [a.strip() for a in value.split(',') if a.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Orthogonal NMF Benchmark Tool - datasets, solvers and experiment sweeps',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Write the full UNION and BION datasets (100 triples)
  python -m scripts.orthofact generate --out data

  # Only UNION instances with n=50 (10 triples)
  python -m scripts.orthofact generate --kind UNION --n 50 --out data

  # Solve one instance with projected gradient, p = 0.6k, beta = 10
  python -m scripts.orthofact solve data/NMF_UNION_data_R_n=50_k=10_id=1.txt --alg pg --p-frac 0.6 --beta 10

  # Desk-scale benchmark on four worker processes
  python -m scripts.orthofact benchmark --kind UNION --n 50 100 --replicates 3 --workers 4 --out results

  # Plot data for the benchmark above
  python -m scripts.orthofact report results/raw.csv --out results/plots

Environment Variables:
  ORTHOFACT_OUTPUT_DIR   Default output directory (default: output)
  ORTHOFACT_MASTER_SEED  Master seed for instances and initializations (default: 20240101)
  ORTHOFACT_WORKERS      Worker processes for benchmark (default: 1)
  ORTHOFACT_LOG_LEVEL    Logging level (default: WARNING)
        """
    )
    parser.add_argument('--verbose', action='store_true', help='Log progress at INFO level')

    subparsers = parser.add_subparsers(dest='command', help='Command to execute')

    # generate command
    generate_parser = subparsers.add_parser('generate', help='Write synthetic instance files')
    generate_parser.add_argument('--kind', nargs='+', choices=['UNION', 'BION'],
                                 help='Dataset kind(s) (default: both)')
    generate_parser.add_argument('--n', type=int, nargs='+',
                                 help='Matrix sizes (default: 50 100 200 500 1000)')
    generate_parser.add_argument('--k-frac', type=float, nargs='+',
                                 help='Construction ranks as fractions of n (default: 0.2 0.4)')
    generate_parser.add_argument('--replicates', type=int, default=5, help='Instances per (n, k)')
    generate_parser.add_argument('--seed', type=int, help='Master seed')
    generate_parser.add_argument('--out', help='Output directory')

    # solve command
    solve_parser = subparsers.add_parser('solve', help='Run one solver on one instance')
    solve_parser.add_argument('instance', help='Path to an NMF_..._data_R_... file')
    solve_parser.add_argument('--alg', required=True, choices=['ding', 'mirzal', 'pg'])
    solve_parser.add_argument('--p', type=int, help='Inner dimension (default: k)')
    solve_parser.add_argument('--p-frac', type=float, help='Inner dimension as a fraction of k')
    solve_parser.add_argument('--beta', type=float, default=0.0, help='G orthogonality penalty (default: 0)')
    solve_parser.add_argument('--alpha', type=float, help='H orthogonality penalty (default: beta on BION)')
    solve_parser.add_argument('--seed', type=int, help='Initialization seed')
    solve_parser.add_argument('--config', help='key=value solver configuration file')
    solve_parser.add_argument('--time-limit', type=float, help='Time budget in seconds')
    solve_parser.add_argument('--max-iters', type=int, help='Iteration budget')
    solve_parser.add_argument('--trace', help='Write the per-iteration trace CSV here')

    # benchmark command
    benchmark_parser = subparsers.add_parser('benchmark', help='Sweep an experiment grid')
    benchmark_parser.add_argument('--kind', nargs='+', choices=['UNION', 'BION'],
                                  help='Dataset kind(s) (default: UNION)')
    benchmark_parser.add_argument('--n', type=int, nargs='+', help='Matrix sizes (default: 50 100)')
    benchmark_parser.add_argument('--k-frac', type=float, nargs='+', help='Construction ranks as fractions of n')
    benchmark_parser.add_argument('--p-frac', type=float, nargs='+', help='Inner dimensions as fractions of k')
    benchmark_parser.add_argument('--beta', type=float, nargs='+', help='Penalty values (default: 1 10 100 1000)')
    benchmark_parser.add_argument('--alg', type=_algorithms, help='Comma-separated algorithms (default: all)')
    benchmark_parser.add_argument('--replicates', type=int, default=3, help='Instances per (n, k)')
    benchmark_parser.add_argument('--seed', type=int, help='Master seed')
    benchmark_parser.add_argument('--config', help='key=value solver configuration file')
    benchmark_parser.add_argument('--time-limit', type=float, help='Time budget per solve in seconds')
    benchmark_parser.add_argument('--max-iters', type=int, help='Iteration budget per solve')
    benchmark_parser.add_argument('--workers', type=int, help='Worker processes')
    benchmark_parser.add_argument('--out', help='Output directory')

    # report command
    report_parser = subparsers.add_parser('report', help='Write plot data from a raw benchmark CSV')
    report_parser.add_argument('raw_csv', help='raw.csv written by benchmark')
    report_parser.add_argument('--out', help='Output directory (default: plots/ next to the CSV)')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for command-line interface."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 1

    try:
        runner = OrthoFactRunner(verbose=args.verbose)
        result = getattr(runner, args.command)(args)
        return 0 if result.get('success') else 1

    except ConfigError as e:
        print(f"\n❌ Configuration Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"\n❌ Error: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
