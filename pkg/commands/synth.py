import argparse

from commands.common import print_json
from data.synth import default_synth_spec, generate


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="write a synthetic restaurant->laptop transfer pair")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--train-size", type=int, default=400)
    parser.add_argument("--test-size", type=int, default=100)
    parser.add_argument("--embedding-dim", type=int, default=50, help="dimension of the emitted word vectors")
    parser.set_defaults(func=cmd_synth)


def cmd_synth(args: argparse.Namespace) -> int:
    spec = default_synth_spec(seed=args.seed, train_size=args.train_size, test_size=args.test_size,
                              embedding_dim=args.embedding_dim)
    paths = generate(spec, args.out_dir)
    print_json({name: str(path) for name, path in paths.items()})
    return 0
