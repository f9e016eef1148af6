"""Operator CLI: ``crossmedia serve | search | crawl ... | export | explain``.

Commands other than ``serve`` and ``explain`` talk to a running service
(``--url`` or ``CROSSMEDIA_URL``).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .activity import PLATFORMS
from .adapters import capabilities
from .gathering import InvalidRequest, SearchRequest
from .query import rewrite_for_platform

DEFAULT_URL = "http://127.0.0.1:8080"
API = "/SocialMediaAPI"


def _client(ctx: click.Context) -> httpx.Client:
    obj = ctx.ensure_object(dict)
    if "client" not in obj:
        obj["client"] = httpx.Client(base_url=obj.get("url") or DEFAULT_URL, timeout=60.0)
    return obj["client"]


def _call(ctx: click.Context, method: str, path: str, **kwargs) -> httpx.Response:
    try:
        resp = _client(ctx).request(method, API + path, **kwargs)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach service: {exc}")
    if resp.status_code >= 400:
        try:
            body = resp.json()
            message = body.get("message", resp.text)
            if body.get("fields"):
                message += " (" + "; ".join(f"{k}: {v}" for k, v in body["fields"].items()) + ")"
        except ValueError:
            message = resp.text
        raise click.ClickException(f"HTTP {resp.status_code}: {message}")
    return resp


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, ensure_ascii=False))


def _platform_list(value: str) -> list[str]:
    return [p.strip() for p in value.split(",") if p.strip()]


def _gathering_params(keyword, platforms, since, until, latitude, longitude, radius) -> dict:
    params = {"keyword": keyword, "platforms": _platform_list(platforms)}
    for key, value in (("since", since), ("until", until), ("latitude", latitude),
                       ("longitude", longitude), ("radius", radius)):
        if value is not None:
            params[key] = value
    return params


def _geo_time_options(f):
    for opt in reversed((
        click.option("--since", type=int, help="Lower bound of the searched timeframe (Unix time)."),
        click.option("--until", type=int, help="Upper bound of the searched timeframe (Unix time)."),
        click.option("--latitude", type=float),
        click.option("--longitude", type=float),
        click.option("--radius", type=float, help="Kilometres around latitude/longitude (default 10)."),
    )):
        f = opt(f)
    return f


@click.group()
@click.option("--url", envvar="CROSSMEDIA_URL", default=DEFAULT_URL, show_default=True, help="Service base URL.")
@click.pass_context
def main(ctx: click.Context, url: str):
    """Cross-platform social media gathering service."""
    ctx.ensure_object(dict).setdefault("url", url)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--host")
@click.option("--port", type=int)
@click.option("--data-dir", type=click.Path(file_okay=False))
@click.option("--no-scheduler", is_flag=True, help="Do not run crawl rounds in the background.")
def serve(config_path, host, port, data_dir, no_scheduler):
    """Start the HTTP service."""
    import uvicorn

    from .api import create_app
    from .config import ConfigError, load_config

    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    cfg.host = host or cfg.host
    cfg.port = port or cfg.port
    if data_dir:
        cfg.data_dir = Path(data_dir)
    uvicorn.run(create_app(config=cfg, run_scheduler=not no_scheduler), host=cfg.host, port=cfg.port)


@main.command()
@click.argument("keyword")
@click.option("--platforms", required=True, help="Comma-separated platforms.")
@_geo_time_options
@click.option("--weight-profile", help="JSON object of assessment method -> weight, or @file.")
@click.pass_context
def search(ctx, keyword, platforms, since, until, latitude, longitude, radius, weight_profile):
    """Run a one-time search and print the collection."""
    body = _gathering_params(keyword, platforms, since, until, latitude, longitude, radius)
    if weight_profile:
        text = open(weight_profile[1:], encoding="utf-8").read() if weight_profile.startswith("@") else weight_profile
        try:
            body["weightProfile"] = json.loads(text)
        except ValueError as exc:
            raise click.BadParameter(f"not JSON: {exc}", param_hint="--weight-profile")
    resp = _call(ctx, "POST", "/searchService", json=body)
    truncated = [p for p, flag in (kv.split("=") for kv in resp.headers.get("X-Truncated", "").split(",") if kv)
                 if flag == "true"]
    if truncated:
        click.echo(f"warning: results truncated by quota on {', '.join(truncated)}", err=True)
    _echo_json(resp.json())


@main.group()
def crawl():
    """Manage crawl jobs."""


@crawl.command("start")
@click.option("--keyword", required=True)
@click.option("--platforms", required=True, help="Comma-separated platforms.")
@click.option("--wait", "wait_ms", type=int, required=True, help="Milliseconds between gathering rounds.")
@click.option("--start", type=int, help="Starting point of the crawl job (Unix time).")
@click.option("--end", type=int, help="Termination point of the crawl job (Unix time).")
@_geo_time_options
@click.pass_context
def crawl_start(ctx, keyword, platforms, wait_ms, start, end, since, until, latitude, longitude, radius):
    """Start a crawl job and print its id."""
    gathering = _gathering_params(keyword, platforms, since, until, latitude, longitude, radius)
    gathering["waitBetweenRequests"] = wait_ms
    if start is not None:
        gathering["start"] = start
    if end is not None:
        gathering["end"] = end
    click.echo(_call(ctx, "POST", "/crawlService", json={"gathering": gathering}).json()["crawljobId"])


@crawl.command("stop")
@click.argument("job_id")
@click.pass_context
def crawl_stop(ctx, job_id):
    """Cancel a crawl job; gathered data is kept."""
    _echo_json(_call(ctx, "POST", f"/crawlService/{job_id}/stop").json())


@crawl.command("list")
@click.pass_context
def crawl_list(ctx):
    """List all jobs, newest first."""
    for job in _call(ctx, "GET", "/crawlService/allJobs").json():
        c = job["counters"]
        click.echo(f"{job['jobId']}  {job['kind']:<6} {job['state']:<9} gathered={c['gathered']} created={job['createdAt']}")


@crawl.command("status")
@click.argument("job_id")
@click.pass_context
def crawl_status(ctx, job_id):
    """Print one job record."""
    _echo_json(_call(ctx, "GET", f"/crawlService/{job_id}/status").json())


@main.command()
@click.argument("job_id")
@click.option("--format", "fmt", type=click.Choice(["jsonl", "collection"]), default="jsonl", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True), help="Defaults to stdout.")
@click.option("--page-size", type=int, default=1000, show_default=True)
@click.pass_context
def export(ctx, job_id, fmt, output, page_size):
    """Write a job's activities as JSON lines or one Collection document."""
    items, offset = [], 0
    while True:
        page = _call(ctx, "GET", f"/crawlService/{job_id}", params={"count": page_size, "offset": offset}).json()
        items.extend(page["items"])
        offset += page_size
        if len(page["items"]) < page_size:
            break
    fh = open(output, "w", encoding="utf-8") if output else sys.stdout
    try:
        if fmt == "jsonl":
            for item in items:
                fh.write(json.dumps(item, ensure_ascii=False) + "\n")
        else:
            json.dump({"type": "Collection", "totalItems": len(items), "items": items}, fh, ensure_ascii=False)
            fh.write("\n")
    finally:
        if output:
            fh.close()
    if output:
        click.echo(f"wrote {len(items)} activities to {output}", err=True)


@main.command()
@click.argument("keyword")
@click.option("--platform", "platforms", multiple=True, type=click.Choice(PLATFORMS),
              help="Repeatable; defaults to all platforms.")
@click.option("--pages", type=int, default=1, show_default=True, help="Pages fetched per native request.")
@_geo_time_options
def explain(keyword, platforms, pages, since, until, latitude, longitude, radius):
    """Print each platform's native requests, post-filter and request-unit cost."""
    params = _gathering_params(keyword, ",".join(platforms or PLATFORMS), since, until, latitude, longitude, radius)
    try:
        req = SearchRequest.from_dict(params)
    except InvalidRequest as exc:
        raise click.ClickException(str(exc))
    for platform in req.platforms:
        click.echo(f"{platform}:")
        try:
            plan = rewrite_for_platform(req.dnf, capabilities(platform), query=req.query,
                                        geo=req.geo, time_window=req.time_window)
        except ValueError as exc:
            click.echo(f"  unsupported: {exc}")
            continue
        for native in plan.native_requests:
            click.echo(f"  request: {native.keyword_string}")
        pf = plan.post_filter.to_dict()
        if not plan.post_filter.empty:
            click.echo(f"  post-filter: {json.dumps(pf, ensure_ascii=False)}")
        click.echo(f"  cost: {len(plan.native_requests) * pages} request units "
                   f"({len(plan.native_requests)} requests x {pages} pages)")


if __name__ == "__main__":
    main()
