"""Command-line front end.

Every subcommand is a thin client of the HTTP service: arguments become one
request, the response becomes files and stdout. By default the app runs
in-process (no sockets); --server URL targets a remote instance instead.

Exit codes: 0 success, 1 usage or domain error, 2 I/O error. Machine
output (CSV) goes to stdout or the --csv path; human-oriented report lines
go to stderr whenever they would otherwise contaminate a CSV stream.
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import os
import sys
from typing import Any

import httpx

from .errors import PnmError
from .imageio import read_pnm, write_pnm
from .pipeline import RESIZE_METHODS, UPSCALE_METHODS

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2

_DEFAULT_STUDY_N = "5,10,15,20,25,30"


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage problems must exit 1 (argparse's default is 2, reserved for I/O).
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageExit(message)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def _build_parser() -> _Parser:
    parser = _Parser(prog="nnscale", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service (default: run in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--kernel-epsilon", type=_positive_float, default=1e-8)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--csv", default=None, help="write CSV here instead of stdout")

    p_resize = sub.add_parser("resize", help="resize one image")
    p_resize.add_argument("input")
    p_resize.add_argument("output")
    p_resize.add_argument("--method", choices=RESIZE_METHODS, default="nn-ramp")
    p_resize.add_argument("--n", type=int, default=10)
    p_resize.add_argument("--r", type=_positive_float, default=2.0)
    p_resize.add_argument("--factor", type=int, default=2)
    p_resize.add_argument("--downscale-offset", type=int, default=0)
    common(p_resize)

    p_pipe = sub.add_parser("pipeline", help="downscale, rebuild, score")
    p_pipe.add_argument("input")
    p_pipe.add_argument(
        "--method",
        action="append",
        default=None,
        help="comma-separated or repeated; default: all upscale methods",
    )
    p_pipe.add_argument("--n", type=int, default=10)
    p_pipe.add_argument("--factor", type=int, default=2)
    p_pipe.add_argument("--downscale-offset", type=int, default=0)
    p_pipe.add_argument("--ssim-constants", choices=("squared", "paper"), default="squared")
    common(p_pipe)

    p_metrics = sub.add_parser("metrics", help="score one image against another")
    p_metrics.add_argument("image")
    p_metrics.add_argument("reference")
    p_metrics.add_argument("--ssim-constants", choices=("squared", "paper"), default="squared")
    common(p_metrics)

    p_study = sub.add_parser("study", help="dissimilarity decay over n")
    p_study.add_argument("input")
    p_study.add_argument("--method", choices=UPSCALE_METHODS, default="nn-ramp")
    p_study.add_argument("--n", type=_int_list, default=None, metavar="N1,N2,...")
    p_study.add_argument("--factor", type=int, default=1)
    p_study.add_argument("--downscale-offset", type=int, default=0)
    p_study.add_argument("--p", type=_positive_float, default=1.0)
    p_study.add_argument(
        "--error-csv",
        default=None,
        help="also run the model L^p error study and write its CSV here",
    )
    common(p_study)

    p_kernel = sub.add_parser("kernel", help="inspect a kernel")
    p_kernel.add_argument("--family", choices=("ramp", "logistic"), default="ramp")
    p_kernel.add_argument("--samples", type=int, default=65)
    common(p_kernel)

    return parser


def _resolve_threads(args: argparse.Namespace) -> int | None:
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise _UsageExit("--threads must be at least 1")
        return args.threads
    env = os.environ.get("NNSCALE_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise _UsageExit(f"NNSCALE_THREADS is not an integer: {env!r}") from None
        if value < 1:
            raise _UsageExit("NNSCALE_THREADS must be at least 1")
        return value
    return os.cpu_count()


def _load_image_b64(path: str) -> str:
    """Read and locally validate a Netpbm file; ship its canonical bytes."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise _IoExit(f"cannot read {path}: {exc}") from exc
    try:
        raster = read_pnm(raw)
    except PnmError as exc:
        raise _IoExit(f"{path}: {exc}") from exc
    return base64.b64encode(write_pnm(raster)).decode("ascii")


class _IoExit(Exception):
    pass


def _post(server: str | None, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    try:
        if server is not None:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                response = client.post(path, json=payload)
        else:
            from .service import create_app

            async def _run() -> httpx.Response:
                transport = httpx.ASGITransport(app=create_app())
                async with httpx.AsyncClient(
                    transport=transport, base_url="http://nnscale.internal", timeout=None
                ) as client:
                    return await client.post(path, json=payload)

            response = asyncio.run(_run())
    except httpx.HTTPError as exc:
        raise _IoExit(f"service request failed: {exc}") from exc
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise _UsageExit(f"service rejected the request: {detail}")
    return response.json()


def _emit_csv(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IoExit(f"cannot write {path}: {exc}") from exc


def _fmt_or(value: float | None, infinity: str) -> str:
    return infinity if value is None else f"{value:.9g}"


def _cmd_resize(args: argparse.Namespace) -> int:
    payload = {
        "image": _load_image_b64(args.input),
        "method": args.method,
        "n": args.n,
        "r": args.r,
        "factor": args.factor,
        "offset": args.downscale_offset,
        "kernel_epsilon": args.kernel_epsilon,
        "threads": _resolve_threads(args),
    }
    body = _post(args.server, "/v1/resize", payload)
    data = base64.b64decode(body["image"])
    try:
        with open(args.output, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise _IoExit(f"cannot write {args.output}: {exc}") from exc
    print(f"{body['rows']}x{body['cols']} in {body['seconds']:.4f}s")
    return EXIT_OK


def _cmd_pipeline(args: argparse.Namespace) -> int:
    if args.method is None:
        methods = list(UPSCALE_METHODS)
    else:
        methods = [tok for chunk in args.method for tok in chunk.split(",") if tok.strip()]
    if not methods:
        raise _UsageExit("no methods requested")
    unknown = [m for m in methods if m not in UPSCALE_METHODS]
    if unknown:
        raise _UsageExit(f"unknown pipeline methods: {', '.join(unknown)}")
    payload = {
        "image": _load_image_b64(args.input),
        "methods": methods,
        "n": args.n,
        "factor": args.factor,
        "offset": args.downscale_offset,
        "kernel_epsilon": args.kernel_epsilon,
        "constants": args.ssim_constants,
        "threads": _resolve_threads(args),
    }
    body = _post(args.server, "/v1/pipeline", payload)
    failed = [row for row in body["rows"] if row.get("error")]
    for row in failed:
        print(f"{row['method']}: {row['error']}", file=sys.stderr)
    _emit_csv(body["csv"], args.csv)
    return EXIT_USAGE if len(failed) == len(body["rows"]) else EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    payload = {
        "image": _load_image_b64(args.image),
        "reference": _load_image_b64(args.reference),
        "constants": args.ssim_constants,
    }
    body = _post(args.server, "/v1/metrics", payload)
    _emit_csv(body["csv"], args.csv)
    return EXIT_OK


def _cmd_study(args: argparse.Namespace) -> int:
    n_values = args.n if args.n is not None else _int_list(_DEFAULT_STUDY_N)
    if len(n_values) < 3:
        raise _UsageExit("a study needs at least 3 n values to fit a slope")
    if sorted(set(n_values)) != n_values:
        raise _UsageExit("n values must be strictly increasing")
    payload = {
        "image": _load_image_b64(args.input),
        "method": args.method,
        "n_values": n_values,
        "factor": args.factor,
        "offset": args.downscale_offset,
        "kernel_epsilon": args.kernel_epsilon,
        "threads": _resolve_threads(args),
        "error_study": args.error_csv is not None,
        "p": args.p,
    }
    body = _post(args.server, "/v1/study", payload)
    slope_line = (
        f"slope {_fmt_or(body['slope'], '-inf')} "
        f"residual {body['residual']:.9g}"
    )
    _emit_csv(body["csv"], args.csv)
    # Keep stdout parseable: the slope goes wherever the CSV is not.
    print(slope_line, file=sys.stderr if args.csv is None else sys.stdout)
    if args.error_csv is not None:
        _emit_csv(body["model_csv"], args.error_csv)
        print(
            f"model slope {_fmt_or(body['model_slope'], '-inf')} "
            f"residual {body['model_residual']:.9g}",
            file=sys.stderr if args.csv is None else sys.stdout,
        )
    return EXIT_OK


def _cmd_kernel(args: argparse.Namespace) -> int:
    if args.samples < 0:
        raise _UsageExit("--samples must be non-negative")
    payload = {
        "family": args.family,
        "epsilon": args.kernel_epsilon,
        "sample_count": args.samples,
    }
    body = _post(args.server, "/v1/kernel", payload)
    report = (
        f"family {body['family']} phi(0) {body['phi_zero']:.9g} "
        f"phi(1) {body['phi_one']:.9g} "
        f"truncation_radius {body['truncation_radius']:.9g} "
        f"m0_max_deviation {body['m0_max_deviation']:.9g}"
    )
    _emit_csv(body["csv"], args.csv)
    print(report, file=sys.stderr if args.csv is None else sys.stdout)
    return EXIT_OK


_COMMANDS = {
    "resize": _cmd_resize,
    "pipeline": _cmd_pipeline,
    "metrics": _cmd_metrics,
    "study": _cmd_study,
    "kernel": _cmd_kernel,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageExit as exc:
        print(f"nnscale: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IoExit as exc:
        print(f"nnscale: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
