"""Command-line entry point.

Exit status: 0 success, 1 lint violations or failed journey
expectations, 2 usage or I/O errors.  Every flag can also be set
through an environment variable with the WAPSHOP_ prefix
(e.g. WAPSHOP_STORE); flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import urllib.request
from importlib import resources

from . import gateway as gw
from . import lint as lint_mod
from . import wbxml, wml
from .journey import ScriptError, SimClock, render_result, run_journey
from .shop import Store
from .storefront import Storefront

ENV_PREFIX = "WAPSHOP_"

USAGE_ERROR = 2


class UsageError(Exception):
    pass


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _parse_link(spec: str) -> gw.LinkProfile:
    if spec == "wap2g":
        return gw.WAP_2G
    if spec == "dialup":
        return gw.DIALUP
    if spec.startswith("custom:"):
        parts = spec.split(":")[1:]
        try:
            bitrate = int(parts[0])
            rtt = int(parts[1]) if len(parts) > 1 else 0
            return gw.LinkProfile("custom", bitrate, rtt)
        except (IndexError, ValueError):
            raise UsageError(f"bad link spec '{spec}'") from None
    raise UsageError(f"unknown link '{spec}' (wap2g, dialup or custom:BITRATE[:RTT])")


def _parse_tariff(spec: str) -> gw.Tariff:
    if spec == "flat":
        return gw.FLAT_TARIFF
    if spec.startswith("airtime:"):
        try:
            return gw.Tariff(gw.AIRTIME, int(spec.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad tariff spec '{spec}'") from None
    raise UsageError(f"unknown tariff '{spec}' (flat or airtime:CENTS_PER_MIN)")


def _load_policy(path: str | None) -> lint_mod.LintPolicy:
    if not path:
        return lint_mod.LintPolicy()
    try:
        with open(path, encoding="utf-8") as f:
            overrides = json.load(f)
        return lint_mod.LintPolicy.from_overrides(overrides)
    except (OSError, ValueError) as exc:
        raise UsageError(f"policy file: {exc}") from None


def _load_admins(path: str | None) -> dict:
    if path:
        try:
            with open(path, encoding="utf-8") as f:
                return json.load(f)
        except (OSError, ValueError) as exc:
            raise UsageError(f"admins file: {exc}") from None
    with resources.files("wapshop.data").joinpath("admins.json").open() as f:
        return json.load(f)


def default_seed_path() -> str:
    return str(resources.files("wapshop.data").joinpath("seed_catalog.json"))


def _open_store(args) -> Store:
    if not args.store:
        raise UsageError("--store is required (or set WAPSHOP_STORE)")
    return Store(args.store)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", default=_env("store"))
    parser.add_argument("--seed", default=_env("seed"))
    parser.add_argument("--origin-port", type=int,
                        default=int(_env("origin_port", 8080)))
    parser.add_argument("--gateway-port", type=int,
                        default=int(_env("gateway_port", 8081)))
    parser.add_argument("--link", default=_env("link", "wap2g"))
    parser.add_argument("--tariff", default=_env("tariff", "airtime:12"))
    parser.add_argument("--policy", default=_env("policy"))
    parser.add_argument("--admins", default=_env("admins"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wapshop",
        description="Deck toolchain, usability linter, storefront and gateway simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the origin storefront and the gateway")
    _add_common(p)

    p = sub.add_parser("lint", help="lint a deck file or crawl a route")
    p.add_argument("target", help=".wml file, route like /menu, or http:// URL")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    _add_common(p)

    p = sub.add_parser("compile", help="compile textual markup to binary")
    p.add_argument("infile")
    p.add_argument("outfile")
    _add_common(p)

    p = sub.add_parser("decompile", help="print the canonical text of a binary deck")
    p.add_argument("infile")
    _add_common(p)

    p = sub.add_parser("seed", help="load a catalog fixture into a fresh store")
    p.add_argument("fixture", nargs="?", help="fixture path (default: built-in catalog)")
    _add_common(p)

    p = sub.add_parser("journey", help="run a scripted session and print the report")
    p.add_argument("script")
    p.add_argument("--figures", metavar="DIR",
                   help="also render comparison charts into DIR")
    _add_common(p)

    return parser


def cmd_compile(args) -> int:
    with open(args.infile, encoding="utf-8") as f:
        deck = wml.parse_deck(f.read())
    compiled = wbxml.compile_deck(deck)
    with open(args.outfile, "wb") as f:
        f.write(compiled.bytes)
    print(f"{args.outfile}: {len(compiled.bytes)} bytes, "
          f"{compiled.source_card_count} card(s)")
    return 0


def cmd_decompile(args) -> int:
    with open(args.infile, "rb") as f:
        deck = wbxml.decompile_deck(f.read())
    print(wml.serialize_deck(deck))
    return 0


def cmd_seed(args) -> int:
    if not args.store:
        raise UsageError("--store is required")
    fixture = args.fixture or args.seed or default_seed_path()
    Store(fixture)  # fails early on a broken fixture
    shutil.copyfile(fixture, args.store)
    store = Store(args.store)
    print(f"{args.store}: {len(store.products)} products, "
          f"{len(store.customers)} customers, {len(store.orders)} orders")
    return 0


def cmd_lint(args) -> int:
    policy = _load_policy(args.policy)
    if args.target.endswith(".wml") or os.path.exists(args.target):
        with open(args.target, encoding="utf-8") as f:
            deck = wml.parse_deck(f.read())
        report = lint_mod.lint_deck(deck, policy)
    elif args.target.startswith(("http://", "https://")):
        from urllib.parse import urlsplit
        parts = urlsplit(args.target)
        base_url = f"{parts.scheme}://{parts.netloc}"
        start = parts.path or "/intro"
        if parts.query:
            start += "?" + parts.query

        def fetch(route: str) -> wml.WmlDeck:
            with urllib.request.urlopen(base_url + route, timeout=10) as resp:
                return wml.parse_deck(resp.read().decode("utf-8"))

        _, report = lint_mod.crawl_site(fetch, start, policy)
    else:
        store = _open_store(args)
        sf = Storefront(store)
        _, report = lint_mod.crawl_site(
            sf.wml_fetcher(), args.target, policy, sf.asset_weights())
    print(report.to_json() if args.json else report.to_text(), end="")
    if any(v.rule == lint_mod.FETCH_RULE for v in report.violations):
        return 2
    return 0 if report.passed else 1


def cmd_journey(args) -> int:
    try:
        with open(args.script, encoding="utf-8") as f:
            script = f.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    store = _open_store(args)
    policy = _load_policy(args.policy)
    link = _parse_link(args.link)
    tariff = _parse_tariff(args.tariff)
    sf = Storefront(store, admins=_load_admins(args.admins), clock=SimClock())
    try:
        result = run_journey(script, store, sf, policy,
                             wap_link=link, wap_tariff=tariff)
    except ScriptError as exc:
        raise UsageError(str(exc)) from None
    print(render_result(result, wap_link=link, wap_tariff=tariff, store=store), end="")
    if args.figures and result.rows:
        from .figures import render_comparison_figures
        report = result.report(link, gw.DIALUP, tariff, gw.FLAT_TARIFF)
        for path in render_comparison_figures(report, args.figures):
            print(f"wrote {path}")
    return 1 if result.failures else 0


def cmd_serve(args) -> int:
    from .server import serve_pair

    store = _open_store(args)
    if not os.path.exists(args.store):
        raise UsageError(f"store file '{args.store}' does not exist (run seed first)")
    sf = Storefront(store, admins=_load_admins(args.admins))
    origin, gw_server = serve_pair(
        sf, origin_port=args.origin_port, gateway_port=args.gateway_port,
        policy=_load_policy(args.policy),
        link=_parse_link(args.link), tariff=_parse_tariff(args.tariff),
    )
    print(f"origin  : http://127.0.0.1:{origin.server_address[1]}/intro")
    print(f"gateway : http://127.0.0.1:{gw_server.server_address[1]}/intro")
    print("Ctrl-C to stop.")
    try:
        import time
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        return 0


COMMANDS = {
    "serve": cmd_serve,
    "lint": cmd_lint,
    "compile": cmd_compile,
    "decompile": cmd_decompile,
    "seed": cmd_seed,
    "journey": cmd_journey,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, wml.ParseError, wbxml.CodecError, wbxml.InvalidDeck) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
