"""Command-line front end.

The CLI is a thin client: every subcommand builds one request, sends it to
the HTTP service, and renders the {meta, data} envelope it gets back.  By
default the service runs in-process over an ASGI transport, so no network
or separate process is involved; --server URL points the same client at a
remote instance instead.

Output is deterministic: identical flags produce byte-identical bytes.
CSV uses comma separators, LF line endings, a header row, and 17
significant digits for reals (round-trip exact for binary64).  JSON output
validates against schemas/cli_output.schema.json.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from . import __version__

_TIMEOUT = httpx.Timeout(600.0)


async def _post_async(path: str, payload: dict, server: str | None) -> httpx.Response:
    if server is None:
        from .service.app import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://service.local", timeout=_TIMEOUT
        ) as client:
            return await client.post(path, json=payload)
    async with httpx.AsyncClient(base_url=server, timeout=_TIMEOUT) as client:
        return await client.post(path, json=payload)


def _post(path: str, payload: dict, server: str | None) -> dict:
    """POST and decode, or exit with the code class of the failure."""
    try:
        response = asyncio.run(_post_async(path, payload, server))
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        raise SystemExit(1)
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        # 4xx from validation is a usage error; anything else failed mid-run
        raise SystemExit(2 if response.status_code in (400, 422) else 1)
    return response.json()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _render_csv(payload: dict) -> str:
    rows = payload["data"]
    if not rows:
        return ""
    cols = [
        c for c in rows[0].keys() if any(r.get(c) is not None for r in rows)
    ]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_cell(row.get(c)) for c in cols))
    return "\n".join(lines) + "\n"


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    return _render_csv(payload)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:  # newline="" keeps LF as-is
            fh.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", default=None)
    p.add_argument("--server", metavar="URL", default=None)
    p.add_argument("--threads", type=int, default=0, metavar="K",
                   help="cap worker threads, 0 = auto (never changes output)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filmspec",
        description="Spectrum, eigenvectors, and resolvent of the one-sided "
        "tridiagonal film operator.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("eig", help="eigenvalue table, optionally with projection norms")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--M", type=int, default=4000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--n-max", type=int, default=400, dest="n_max")
    p.add_argument("--proj", action="store_true")
    _add_common(p)

    p = sub.add_parser("scan", help="sign and log-magnitude of f on a lambda grid")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--M", type=int, default=4000)
    _add_common(p)

    p = sub.add_parser("eigvec", help="eigenvector rows, or its theta-space synthesis")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--M", type=int, default=4000)
    p.add_argument("--n-max", type=int, default=400, dest="n_max")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--grid", type=int, default=0,
                   help="theta sample count; 0 emits coefficient rows")
    _add_common(p)

    p = sub.add_parser("resolvent", help="inverse-kernel statistics and identity residual")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n-max", type=int, default=400, dest="n_max")
    p.add_argument("--M", type=int, default=4000)
    p.add_argument("--n-cols", type=int, default=50, dest="n_cols")
    _add_common(p)

    p = sub.add_parser("truncate", help="finite-section spectra vs shooting results")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--N", type=int, action="append", dest="sizes", metavar="N",
                   help="matrix order; repeatable (default 50 100 200 400)")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--M", type=int, default=4000)
    p.add_argument("--tol", type=float, default=1e-3)
    _add_common(p)

    p = sub.add_parser("verify", help="run the decay/monotonicity bound suite")
    _add_common(p)

    p = sub.add_parser("fit", help="power-law fit of the eigenvalue sequence")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--count", type=int, default=12)
    p.add_argument("--M", type=int, default=4000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--lambdas", default=None, metavar="L1,L2,...",
                   help="fit these values instead of computing a spectrum")
    p.add_argument("--indices", default=None, metavar="N1,N2,...",
                   help="row indices for --lambdas (default 1,2,...)")
    _add_common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _request_for(args: argparse.Namespace) -> tuple[str, dict]:
    if args.cmd == "eig":
        return "/v1/spectrum", {
            "epsilon": args.eps, "count": args.count, "M": args.M,
            "tol": args.tol, "step": args.step, "proj": args.proj,
            "n_max": args.n_max,
        }
    if args.cmd == "scan":
        return "/v1/scan", {
            "epsilon": args.eps, "lo": args.lo, "hi": args.hi,
            "step": args.step, "M": args.M,
        }
    if args.cmd == "eigvec":
        return "/v1/eigenvector", {
            "epsilon": args.eps, "index": args.index, "M": args.M,
            "n_max": args.n_max, "tol": args.tol, "grid": args.grid,
        }
    if args.cmd == "resolvent":
        return "/v1/resolvent", {
            "epsilon": args.eps, "n_max": args.n_max, "M": args.M,
            "n_cols": args.n_cols,
        }
    if args.cmd == "truncate":
        return "/v1/truncation", {
            "epsilon": args.eps, "sizes": args.sizes or [50, 100, 200, 400],
            "count": args.count, "M": args.M, "tol": args.tol,
        }
    if args.cmd == "verify":
        return "/v1/bounds", {}
    if args.cmd == "fit":
        payload = {
            "epsilon": args.eps, "count": args.count, "M": args.M,
            "tol": args.tol,
        }
        if args.lambdas is not None:
            payload["lambdas"] = [
                float(part) for part in args.lambdas.split(",") if part.strip()
            ]
        if args.indices is not None:
            payload["indices"] = [
                int(part) for part in args.indices.split(",") if part.strip()
            ]
        return "/v1/fit", payload
    raise AssertionError(f"unhandled subcommand {args.cmd}")


def run(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.cmd == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return 2
    try:
        path, payload = _request_for(args)
        envelope = _post(path, payload, args.server)
    except SystemExit as exc:
        return int(exc.code)
    _emit(_render(envelope, args.format), args.out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
