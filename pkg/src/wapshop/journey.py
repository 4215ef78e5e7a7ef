"""Headless scripted shopping sessions.

Script format: UTF-8, one action per line, shell-style quoting.
Blank lines and lines starting with '#' are skipped.

    goto <route>             render a page (session token added automatically)
    form <route> k=v ...     submit a form and follow the redirect
    expect <predicate>       order_total=<cents> | cart_size=<n> | lint_pass

Comparable routes visited with `goto` are measured in both channels at
visit time and make up the final report, so replays over the same store
snapshot produce identical bytes.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field

from . import gateway as gw
from . import wbxml, wml
from .lint import LintPolicy, lint_deck
from .shop import Store, format_price
from .storefront import HTML_ROUTES, Route, SESSION_PARAM, Storefront, parse_route


class ScriptError(Exception):
    """The journey script itself is unusable (usage error, exit 2)."""


class SimClock:
    """Deterministic clock: starts at a fixed epoch, ticks once per reading."""

    def __init__(self, start: float = 1_136_073_600.0, step: float = 1.0):
        self.now = start
        self.step = step

    def __call__(self) -> float:
        self.now += self.step
        return self.now


@dataclass
class JourneyResult:
    lines: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    order_id: str | None = None

    def report(self, wap_link, html_link, wap_tariff, html_tariff) -> gw.ComparisonReport:
        return gw.ComparisonReport(wap_link, html_link, wap_tariff, html_tariff,
                                   tuple(self.rows))


def _strip_token(route: Route) -> str:
    return Route(route.path, tuple(
        (k, v) for k, v in route.params if k != SESSION_PARAM)).url()


def run_journey(script: str, store: Store, storefront: Storefront | None = None,
                policy: LintPolicy | None = None,
                wap_link=gw.WAP_2G, html_link=gw.DIALUP,
                wap_tariff=gw.AIRTIME_TARIFF, html_tariff=gw.FLAT_TARIFF) -> JourneyResult:
    """Execute a script; raises ScriptError for unusable scripts."""
    policy = policy or LintPolicy()
    sf = storefront or Storefront(store, clock=SimClock())
    result = JourneyResult()
    token: str | None = None
    username: str | None = None
    last_deck = None
    acted = False

    def say(line: str) -> None:
        result.lines.append(line)

    def capture(route: Route) -> None:
        if route.path in HTML_ROUTES:
            result.rows.append(gw.comparison_row(
                sf, Route(route.path, tuple(
                    (k, v) for k, v in route.params if k != SESSION_PARAM)),
                token, username, wap_link, html_link, wap_tariff, html_tariff))

    def with_token(route: Route) -> Route:
        if token and route.param(SESSION_PARAM) is None:
            return Route(route.path, route.params + ((SESSION_PARAM, token),))
        return route

    for lineno, raw in enumerate(script.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            words = shlex.split(line)
        except ValueError as exc:
            raise ScriptError(f"line {lineno}: {exc}") from None
        action, args = words[0], words[1:]

        if action == "goto":
            if len(args) != 1:
                raise ScriptError(f"line {lineno}: goto takes one route")
            acted = True
            route = with_token(parse_route(args[0]))
            last_deck = sf.render_page(route)
            size = len(wbxml.compile_deck(last_deck).bytes) \
                if not wml.validate_deck(last_deck) else 0
            say(f"goto {_strip_token(route)} [{last_deck.cards[0].id}] {size} B compiled")
            capture(route)

        elif action == "form":
            if not args:
                raise ScriptError(f"line {lineno}: form needs a route")
            acted = True
            route = with_token(parse_route(args[0]))
            fields = {}
            for pair in args[1:]:
                key, eq, value = pair.partition("=")
                if not eq:
                    raise ScriptError(f"line {lineno}: field '{pair}' is not k=v")
                fields[key] = value
            outcome = sf.handle_form(route, fields, token)
            say(f"form {route.path}: {outcome.effect}")
            if outcome.token:
                token = outcome.token
                principal = sf.sessions.resolve(token, sf.clock())
                username = getattr(principal, "username", None)
            if outcome.order_id:
                result.order_id = outcome.order_id
            if outcome.redirect is not None:
                target = with_token(outcome.redirect)
                last_deck = sf.render_page(target)
                say(f"  -> {_strip_token(target)} [{last_deck.cards[0].id}]")
            elif outcome.deck is not None:
                last_deck = outcome.deck
                say("  -> error card")

        elif action == "expect":
            if len(args) != 1:
                raise ScriptError(f"line {lineno}: expect takes one predicate")
            acted = True
            pred = args[0]
            ok, detail = _check_predicate(pred, sf, store, username, last_deck,
                                          result, policy)
            say(f"expect {pred}: {'ok' if ok else 'FAILED ' + detail}")
            if not ok:
                result.failures.append(f"line {lineno}: expect {pred}: {detail}")

        else:
            raise ScriptError(f"line {lineno}: unknown action '{action}'")

    if not acted:
        raise ScriptError("script has no actions")
    return result


def _check_predicate(pred: str, sf: Storefront, store: Store, username,
                     last_deck, result: JourneyResult, policy: LintPolicy):
    name, eq, value = pred.partition("=")
    if name == "lint_pass":
        if last_deck is None:
            return False, "nothing rendered yet"
        report = lint_deck(last_deck, policy, sf.asset_weights())
        if report.passed:
            return True, ""
        first = report.violations[0]
        return False, f"{first.rule} {first.message}"
    if name == "cart_size":
        if not eq or username is None:
            return False, "needs =n and a logged-in customer"
        size = sum(line.qty for line in store.cart(username))
        return size == int(value), f"cart has {size} unit(s)"
    if name == "order_total":
        if not eq:
            return False, "needs =cents"
        if result.order_id is None:
            return False, "no order placed"
        order = store.get_order(result.order_id)
        return (order.total_cents == int(value),
                f"order total is {order.total_cents} ({format_price(order.total_cents)})")
    return False, f"unknown predicate '{name}'"


def render_result(result: JourneyResult, wap_link=gw.WAP_2G, html_link=gw.DIALUP,
                  wap_tariff=gw.AIRTIME_TARIFF, html_tariff=gw.FLAT_TARIFF,
                  store: Store | None = None) -> str:
    out = list(result.lines)
    out.append("")
    if result.rows:
        out.append(result.report(wap_link, html_link, wap_tariff, html_tariff).to_text())
    if result.order_id and store is not None:
        order = store.get_order(result.order_id)
        out.append(f"order {order.id}: {len(order.lines)} line(s), "
                   f"payment {order.payment}, total {format_price(order.total_cents)}")
        for line in order.lines:
            out.append(f"  {line.product_id} {line.name} x{line.qty} @ "
                       f"{format_price(line.unit_price_cents)}")
    if result.failures:
        out.append("FAILURES:")
        out.extend(f"  {f}" for f in result.failures)
    else:
        out.append("all expectations met")
    return "\n".join(out) + "\n"
