"""REST surface under ``/SocialMediaAPI``.

Every non-2xx response body is an error object
``{"error": <code>, "message": <text>, "fields": {<field>: <message>}}``.
"""

from __future__ import annotations

import json
import logging
from contextlib import asynccontextmanager
from typing import Any, Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool
from starlette.exceptions import HTTPException as StarletteHTTPException

from .activity import ActivityError, InvalidActivity, parse_activity, validate_activity
from .adapters import load_adapters
from .config import ServiceConfig
from .enrichment import Lexicons, enrich_activity
from .gathering import CrawlJobSpec, GatheringService, InvalidRequest, QuotaError, Scheduler, SearchRequest
from .quality import AssessmentError, QueryContext, WeightProfile, rank_activities
from .storage import ActivityStore, JobNotFound, JobRunning

log = logging.getLogger(__name__)

PREFIX = "/SocialMediaAPI"


class ApiError(Exception):
    def __init__(self, status: int, error: str, message: str, fields: Optional[dict] = None, headers=None):
        super().__init__(message)
        self.status = status
        self.error = error
        self.message = message
        self.fields = fields
        self.headers = headers


def error_body(error: str, message: str, fields: Optional[dict] = None) -> dict:
    body: dict[str, Any] = {"error": error, "message": message}
    if fields:
        body["fields"] = fields
    return body


async def _json_body(request: Request) -> Any:
    ctype = request.headers.get("content-type", "")
    if ctype.split(";")[0].strip().lower() != "application/json":
        raise ApiError(415, "unsupported_media_type", "Content-Type must be application/json")
    raw = await request.body()
    try:
        return json.loads(raw)
    except ValueError as exc:
        raise ApiError(400, "invalid_json", f"request body is not valid JSON: {exc}")


def _invalid(exc: InvalidRequest) -> ApiError:
    return ApiError(400, "invalid_request", exc.message, exc.fields)


def _not_found(job_id: str) -> ApiError:
    return ApiError(404, "not_found", f"unknown job {job_id}")


def build_service(config: ServiceConfig) -> GatheringService:
    store = ActivityStore(config.data_dir)
    adapters = load_adapters(config.fixture_dir, budgets=config.budgets)
    lexicons = Lexicons.load(config.lexicon_dir) if config.lexicon_dir else None
    return GatheringService(store, adapters, lexicons)


def create_app(
    service: Optional[GatheringService] = None,
    config: Optional[ServiceConfig] = None,
    run_scheduler: bool = False,
) -> FastAPI:
    config = config or ServiceConfig()
    service = service or build_service(config)
    scheduler = Scheduler(service, poll_interval=config.poll_interval) if run_scheduler else None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if scheduler is not None:
            scheduler.start()
        try:
            yield
        finally:
            if scheduler is not None:
                scheduler.stop()
            service.store.flush()

    app = FastAPI(title="Cross-platform Social Media API", lifespan=lifespan)
    app.state.service = service

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(error_body(exc.error, exc.message, exc.fields), status_code=exc.status, headers=exc.headers)

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "http_error")
        return JSONResponse(error_body(code, str(exc.detail)), status_code=exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        fields = {str(err["loc"][-1]): err["msg"] for err in exc.errors()}
        return JSONResponse(error_body("invalid_request", "invalid parameters", fields), status_code=400)

    # -- crawl service ------------------------------------------------------------

    @app.post(PREFIX + "/crawlService", status_code=201)
    async def start_crawl(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or not isinstance(body.get("gathering"), dict):
            raise ApiError(400, "invalid_request", 'payload must wrap parameters in a "gathering" object',
                           {"gathering": "required"})
        try:
            spec = CrawlJobSpec.from_dict(body["gathering"])
        except InvalidRequest as exc:
            raise _invalid(exc)
        return JSONResponse({"crawljobId": service.start_crawl(spec)}, status_code=201)

    # Declared before the {crawljobId} route so "allJobs" is not taken as an id.
    @app.get(PREFIX + "/crawlService/allJobs")
    def all_jobs():
        return [r.to_dict() for r in service.list_jobs()]

    @app.get(PREFIX + "/crawlService/{crawljobId}")
    def load_job(crawljobId: str, count: int = Query(100), offset: int = Query(0)):
        fields = {}
        if count < 1:
            fields["count"] = "must be at least 1"
        if offset < 0:
            fields["offset"] = "must not be negative"
        if fields:
            raise ApiError(400, "invalid_request", "invalid paging parameters", fields)
        try:
            return service.store.load_page(crawljobId, count, offset).to_dict()
        except JobNotFound:
            raise _not_found(crawljobId)

    @app.get(PREFIX + "/crawlService/{crawljobId}/status")
    def job_status(crawljobId: str):
        try:
            return service.job_status(crawljobId).to_dict()
        except JobNotFound:
            raise _not_found(crawljobId)

    @app.post(PREFIX + "/crawlService/{crawljobId}/stop")
    def stop_job(crawljobId: str):
        try:
            return service.stop_crawl(crawljobId).to_dict()
        except JobNotFound:
            raise _not_found(crawljobId)

    @app.delete(PREFIX + "/crawlService/{crawljobId}")
    def delete_job(crawljobId: str):
        try:
            return {"removed": service.delete_job(crawljobId)}
        except JobNotFound:
            raise _not_found(crawljobId)
        except JobRunning as exc:
            raise ApiError(409, "conflict", str(exc))

    @app.post(PREFIX + "/activities")
    async def load_by_ids(request: Request):
        body = await _json_body(request)
        if not isinstance(body, list) or not all(isinstance(i, str) for i in body):
            raise ApiError(400, "invalid_request", "body must be a list of activity ids")
        collection = service.store.load_by_ids(body)
        out = collection.to_dict()
        out["missing"] = list(collection.missing)
        return out

    # -- search service -----------------------------------------------------------

    @app.post(PREFIX + "/searchService")
    async def search(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise ApiError(400, "invalid_request", "request body must be a JSON object")
        profile = None
        if body.get("weightProfile") is not None:
            try:
                profile = WeightProfile.from_json(body["weightProfile"])
                if not profile.active():
                    raise AssessmentError("no methods selected")
            except AssessmentError as exc:
                raise ApiError(400, "invalid_request", str(exc), {"weightProfile": str(exc)})
        params = {k: v for k, v in body.items() if k != "weightProfile"}
        try:
            req = SearchRequest.from_dict(params)
        except InvalidRequest as exc:
            raise _invalid(exc)
        try:
            result = await run_in_threadpool(service.run_search, req)
        except QuotaError as exc:
            raise ApiError(503, "quota_exhausted", str(exc), headers={"Retry-After": str(max(1, round(exc.retry_after)))})
        headers = {
            "X-Job-Id": result.job.job_id,
            "X-Truncated": ",".join(f"{p}={str(v).lower()}" for p, v in result.truncated.items()),
        }
        collection = result.collection
        if profile is None:
            return JSONResponse(collection.to_dict(), headers=headers)
        ranked = rank_activities(collection.items, profile, q=QueryContext.from_query(req.query))
        items = []
        for activity, score in ranked:
            doc = activity.to_dict()
            doc["qualityScore"] = score
            items.append(doc)
        return JSONResponse({"type": "Collection", "totalItems": len(items), "items": items}, headers=headers)

    # -- enrichment service -------------------------------------------------------

    @app.post(PREFIX + "/enrichment")
    async def enrichment(request: Request):
        body = await _json_body(request)
        if not isinstance(body, list):
            raise ApiError(400, "invalid_request", "body must be a list of activities")
        activities, problems = [], {}
        for i, doc in enumerate(body):
            try:
                a = parse_activity(doc)
                violations = validate_activity(a)
                if violations:
                    raise InvalidActivity(violations)
                activities.append(a)
            except (ActivityError, ValueError, TypeError) as exc:
                problems[str(i)] = str(exc)
        if problems:
            raise ApiError(400, "invalid_request", f"{len(problems)} invalid activities", problems)
        enriched = await run_in_threadpool(lambda: [enrich_activity(a, service.lexicons) for a in activities])
        return [a.to_dict() for a in enriched]

    return app
