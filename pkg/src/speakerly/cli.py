import sys
import argparse
import logging

from . import constants
from .corpus import SyntheticSpec, synth_corpus, load_corpus, write_corpus
from .dsp_frontend import ResidualMeasure, prepare, extract_features
from .linear_codebook import SplitMethod, DistanceMeasure
from .recognizer import ResidueSource, DecisionCriterion, CostModel, identify, cost_lpcc, cost_mlp, cost_lpc_residue
from .experiment import TrainingConfig, SpeakerIdentification, train_models, evaluate_grid, best_alpha
from .exceptions.custom_exceptions import SpeakerlyException
from .utils.input_output_utils import read_wav, save_models, load_models, read_key_value_file, \
                                      write_data_file, write_json
from .utils.utils import parse_alpha_grid, convert_time_interval_to_human_readable

logger = logging.getLogger(__name__)

BOOLEAN_FLAGS = ["no_nonlinear"]
GLOBAL_FLAGS = ["log_level", "n_jobs"]


def _int_list(text):
    return [int(item) for item in str(text).split(",") if item.strip()]


def _add_corpus_source(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--corpus", type=str, help="corpus directory laid out as root/speaker_id/{train,test}/*.wav")
    group.add_argument("--synthetic", type=str, help="synthetic corpus spec file (key = value)")


def _add_training_flags(parser):
    parser.add_argument("--lloyd-iters", type=int, default=constants.DEFAULT_LLOYD_ITERS, help="generalized Lloyd iterations of the nonlinear codebook")
    parser.add_argument("--seed", type=int, default=constants.DEFAULT_SEED, help="random seed")
    parser.add_argument("--split-method", type=str, default=SplitMethod.STDDEV.value, choices=[m.value for m in SplitMethod])
    parser.add_argument("--distance", type=str, default=DistanceMeasure.MAE.value, choices=[m.value for m in DistanceMeasure])
    parser.add_argument("--epochs-per-start", type=int, default=constants.DEFAULT_EPOCHS_PER_START)
    parser.add_argument("--num-random-starts", type=int, default=constants.DEFAULT_NUM_RANDOM_STARTS)


def _add_scoring_flags(parser):
    parser.add_argument("--k", type=int, default=constants.DEFAULT_K, help="number of preselected speakers")
    parser.add_argument("--measure", type=str, default=ResidualMeasure.MAE.value, choices=[m.value for m in ResidualMeasure])
    parser.add_argument("--residue", type=str, default=ResidueSource.MLP.value, choices=[s.value for s in ResidueSource])
    parser.add_argument("--criterion", type=str, default=DecisionCriterion.FUSION.value, choices=[c.value for c in DecisionCriterion])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="speakerly",
        description="Speaker identification with LPCC codebooks fused with nonlinear prediction residuals.",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--config", type=str, help="key = value file mirroring the flags; flags override it")
    parser.add_argument("--log-level", type=str, default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--n-jobs", type=int, default=1, help="worker processes for training and scoring")
    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", help="train speaker models")
    _add_corpus_source(train)
    train.add_argument("--out", type=str, required=True, help="output model file")
    train.add_argument("--linear-bits", type=int, default=constants.DEFAULT_LINEAR_BITS)
    train.add_argument("--nonlinear-bits", type=int, default=constants.DEFAULT_NONLINEAR_BITS)
    train.add_argument("--no-nonlinear", action="store_true", help="train linear codebooks only")
    _add_training_flags(train)
    train.set_defaults(func=run_train)

    identify_parser = subparsers.add_parser("identify", help="identify the speaker of one WAV file")
    identify_parser.add_argument("--models", type=str, required=True)
    identify_parser.add_argument("--wav", type=str, required=True)
    identify_parser.add_argument("--alpha", type=float, default=None, help="residual weight (default: alpha stored in the model file)")
    _add_scoring_flags(identify_parser)
    identify_parser.set_defaults(func=run_identify)

    evaluate_parser = subparsers.add_parser("evaluate", help="closed-set identification error on the test utterances")
    evaluate_parser.add_argument("--models", type=str, required=True)
    _add_corpus_source(evaluate_parser)
    evaluate_parser.add_argument("--alpha", type=float, default=None)
    evaluate_parser.add_argument("--report", type=str, help="output JSON report")
    evaluate_parser.add_argument("--decisions", type=str, help="output per-decision data file")
    _add_scoring_flags(evaluate_parser)
    evaluate_parser.set_defaults(func=run_evaluate)

    sweep_alpha_parser = subparsers.add_parser("sweep-alpha", help="error rate as a function of alpha")
    sweep_alpha_parser.add_argument("--models", type=str, required=True)
    _add_corpus_source(sweep_alpha_parser)
    sweep_alpha_parser.add_argument("--alphas", type=str, required=True, help="a,b,c | lin:START:STOP:N | log:START:STOP:N")
    sweep_alpha_parser.add_argument("--out", type=str, required=True)
    _add_scoring_flags(sweep_alpha_parser)
    sweep_alpha_parser.set_defaults(func=run_sweep_alpha)

    sweep_k_parser = subparsers.add_parser("sweep-k", help="error rate and cost as a function of K")
    sweep_k_parser.add_argument("--models", type=str, required=True)
    _add_corpus_source(sweep_k_parser)
    sweep_k_parser.add_argument("--alpha", type=float, default=None)
    sweep_k_parser.add_argument("--ks", type=str, default=None, help="comma separated K values (default 1..N)")
    sweep_k_parser.add_argument("--out", type=str, required=True)
    _add_scoring_flags(sweep_k_parser)
    sweep_k_parser.set_defaults(func=run_sweep_k)

    cost = subparsers.add_parser("cost", help="instruction counts of the LPCC and fused recognizers")
    cost.add_argument("--t-cl", type=int, default=constants.DEFAULT_COST_MODEL["t_cl"])
    cost.add_argument("--t-cnl", type=int, default=constants.DEFAULT_COST_MODEL["t_cnl"])
    cost.add_argument("--k", type=int, default=constants.DEFAULT_COST_MODEL["k"])
    cost.add_argument("--n", type=int, default=constants.DEFAULT_COST_MODEL["n"])
    cost.add_argument("--c-tg", type=int, default=constants.DEFAULT_C_TG)
    cost.add_argument("--p", type=int, default=constants.DEFAULT_COST_MODEL["p"])
    cost.add_argument("--l-t", type=int, default=constants.DEFAULT_COST_MODEL["l_t"])
    cost.set_defaults(func=run_cost)

    synth = subparsers.add_parser("synth", help="write a synthetic corpus as WAV files")
    synth.add_argument("--spec", type=str, default=None, help="synthetic spec file (default settings when omitted)")
    synth.add_argument("--out", type=str, required=True)
    synth.set_defaults(func=run_synth)

    grid = subparsers.add_parser("grid", help="train and evaluate a grid of codebook sizes and iterations")
    _add_corpus_source(grid)
    grid.add_argument("--linear-bits", type=str, default="4,5,6,7")
    grid.add_argument("--nonlinear-bits", type=str, default="3,4,5")
    grid.add_argument("--lloyd-iters-list", type=str, default="0,3")
    grid.add_argument("--alpha", type=float, default=None)
    grid.add_argument("--alphas", type=str, default=None, help="pick the best alpha of this grid per cell")
    grid.add_argument("--k", type=int, default=constants.DEFAULT_K)
    grid.add_argument("--measure", type=str, default=ResidualMeasure.MAE.value, choices=[m.value for m in ResidualMeasure])
    grid.add_argument("--out", type=str, required=True)
    _add_training_flags(grid)
    grid.set_defaults(func=run_grid)

    return parser


def _apply_config_file(parser, argv):
    """Use the values of `--config` as defaults of the selected subcommand, so explicit flags win."""

    # required flags may come from the file, so only --config and the command are read first
    pre_parser = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre_parser.add_argument("--config", type=str)
    pre_parser.add_argument("--log-level", type=str)
    pre_parser.add_argument("--n-jobs", type=str)
    pre_args, rest = pre_parser.parse_known_args(argv)
    command = next((item for item in rest if not item.startswith("-")), None)
    if (pre_args.config is None) or (command is None):
        return parser.parse_args(argv)

    values = read_key_value_file(pre_args.config)
    for key in BOOLEAN_FLAGS:
        if key in values:
            values[key] = values[key].strip().lower() in ("1", "true", "yes", "on")

    parser.set_defaults(**{key: value for key, value in values.items() if key in GLOBAL_FLAGS})
    subparsers = next(action for action in parser._actions if isinstance(action, argparse._SubParsersAction))
    command_parser = subparsers.choices.get(command)
    if command_parser is None:
        return parser.parse_args(argv)
    command_parser.set_defaults(**{key: value for key, value in values.items() if key not in GLOBAL_FLAGS})

    # values supplied by the file satisfy required flags
    for action in command_parser._actions:
        if action.dest in values:
            action.required = False
    for group in command_parser._mutually_exclusive_groups:
        if any(action.dest in values for action in group._group_actions):
            group.required = False
    return parser.parse_args(argv)


def _corpus_from_args(args):
    if args.synthetic is not None:
        return synth_corpus(SyntheticSpec.from_dict(read_key_value_file(args.synthetic)))
    return load_corpus(args.corpus)


def _training_config_from_args(args, **overrides):
    values = {"lloyd_iters": args.lloyd_iters,
              "split_method": args.split_method,
              "distance": args.distance,
              "epochs_per_start": args.epochs_per_start,
              "num_random_starts": args.num_random_starts,
              "seed": args.seed,
              "n_jobs": args.n_jobs}
    values.update(overrides)
    return TrainingConfig(**values)


def _alpha_or_stored(alpha, model_file):
    if alpha is not None:
        return alpha
    return model_file.alpha if model_file.alpha is not None else constants.DEFAULT_ALPHA


def run_train(args):
    config = _training_config_from_args(args,
                                        linear_bits=args.linear_bits,
                                        nonlinear_bits=args.nonlinear_bits,
                                        train_nonlinear=not args.no_nonlinear)
    models = train_models(_corpus_from_args(args), config)
    save_models(models, args.out, training_config=config.to_dict())
    print(f"Trained {len(models)} speaker models -> {args.out}")


def run_identify(args):
    model_file = load_models(args.models)
    features = extract_features(prepare(read_wav(args.wav)))
    result = identify(features.frames, features.lpcc, model_file.models,
                      alpha=_alpha_or_stored(args.alpha, model_file), k=args.k,
                      measure=args.measure, residue_source=args.residue, criterion=args.criterion)

    print(f"decided speaker: {result.decided_speaker}")
    print(f"preselected: {', '.join(result.preselected)}")
    for speaker in result.preselected:
        print(f"  {speaker}: combined {result.combined_scores[speaker]:.6g} "
              f"(lpcc {result.lpcc_scores[speaker]:.6g}, residual {result.residual_scores.get(speaker, float('nan')):.6g})")
    print(f"frames scored: {result.frames_scored}, instructions: {result.instruction_count} "
          f"({result.instructions_per_frame} per frame)")


def _session(args, model_file):
    return SpeakerIdentification(model_file.models, _corpus_from_args(args),
                                 measure=args.measure, residue_source=args.residue, n_jobs=args.n_jobs)


def run_evaluate(args):
    model_file = load_models(args.models)
    session = _session(args, model_file)
    report = session.evaluate(_alpha_or_stored(args.alpha, model_file), args.k, args.criterion,
                              extra_config={"seed": model_file.training_config.get("seed")})

    print(f"error rate: {report.error_rate:.4f} ({report.wrong_decisions}/{report.total_decisions}) "
          f"in {convert_time_interval_to_human_readable(report.total_execution_time, 's')}")
    if args.report is not None:
        write_json(report.to_dict(), args.report)
    if args.decisions is not None:
        write_data_file(report.decisions_frame(), args.decisions)


def run_sweep_alpha(args):
    model_file = load_models(args.models)
    table = _session(args, model_file).sweep_alpha(parse_alpha_grid(args.alphas), args.k, args.criterion)
    write_data_file(table, args.out)

    chosen = best_alpha(table)
    save_models(model_file.models, args.models, training_config=model_file.training_config, alpha=chosen)
    print(f"best alpha {chosen:.6g} (error rate {table['error_rate'].min():.4f}) stored in {args.models}")


def run_sweep_k(args):
    model_file = load_models(args.models)
    ks = None if args.ks is None else _int_list(args.ks)
    table = _session(args, model_file).sweep_k(_alpha_or_stored(args.alpha, model_file), ks, args.criterion)
    write_data_file(table, args.out)
    print(table.to_string(index=False))


def run_cost(args):
    cm = CostModel(t_cl=args.t_cl, t_cnl=args.t_cnl, k=args.k, n=args.n, c_tg=args.c_tg, p=args.p, l_t=args.l_t)
    print(f"cost_lpcc: {cost_lpcc(cm)}")
    print(f"cost_mlp: {cost_mlp(cm)}")
    print(f"cost_lpc_residue: {cost_lpc_residue(cm)}")


def run_synth(args):
    values = {} if args.spec is None else read_key_value_file(args.spec)
    corpus = synth_corpus(SyntheticSpec.from_dict(values), prepare_signals=False)
    write_corpus(corpus, args.out)
    print(f"Wrote {len(corpus)} synthetic speakers -> {args.out}")


def run_grid(args):
    table = evaluate_grid(_corpus_from_args(args),
                          _int_list(args.linear_bits),
                          _int_list(args.nonlinear_bits),
                          _int_list(args.lloyd_iters_list),
                          config=_training_config_from_args(args),
                          alpha=args.alpha,
                          alphas=None if args.alphas is None else parse_alpha_grid(args.alphas),
                          k=args.k,
                          measure=args.measure,
                          out_path=args.out)
    print(table.to_string(index=False))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config_file(parser, argv)
        logging.basicConfig(level=args.log_level,
                            format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        args.func(args)
    except SpeakerlyException as e:
        error = e.to_dict()
        print(f"error {error['status_code']}: {error['error_message']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
