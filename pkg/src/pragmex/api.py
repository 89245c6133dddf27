"""HTTP JSON facade over the session service.

All domain errors surface as 400 with a stable ``{code, message}`` body;
an unknown session id is the one 404.  The payload shapes are what the
web client consumes verbatim.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .errors import InvalidArgument, PragmexError
from .service import GuessUpdate, Robot, SessionService, UiMode


class CreateSessionBody(BaseModel):
    ui_mode: str
    robot: str
    seed: int | None = None
    target: str | None = None


class ExampleBody(BaseModel):
    string: str
    sign: str | None = None


def _parse_enum(enum_cls, value, what: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise InvalidArgument(f"{what} must be one of: {choices}") from None


def _update_body(update: GuessUpdate) -> dict:
    return {
        "guess": update.guess,
        "solved": update.solved,
        "posterior_size": update.posterior_size,
    }


def create_app(service: SessionService) -> FastAPI:
    app = FastAPI(title="pragmex", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(PragmexError)
    async def on_domain_error(request: Request, exc: PragmexError):
        status = 404 if getattr(exc, "http_not_found", False) else 400
        return JSONResponse(
            status_code=status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "InvalidArgument", "message": str(exc.errors()[:1])},
        )

    def lookup(session_id: str):
        try:
            return service.get_session(session_id)
        except PragmexError as exc:
            exc.http_not_found = True
            raise

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "version": __version__,
            "sessions": len(service.session_ids()),
            "domain": service.domain.describe(),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        sess = service.create_session(
            _parse_enum(UiMode, body.ui_mode, "ui_mode"),
            _parse_enum(Robot, body.robot, "robot"),
            seed=body.seed,
            target=body.target,
        )
        return service.session_view(sess)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.session_view(lookup(session_id))

    @app.post("/sessions/{session_id}/examples")
    def add_example(session_id: str, body: ExampleBody):
        lookup(session_id)
        return _update_body(service.add_example(session_id, body.string, body.sign))

    @app.delete("/sessions/{session_id}/examples")
    def remove_example(session_id: str, body: ExampleBody):
        lookup(session_id)
        return _update_body(service.remove_example(session_id, body.string, body.sign))

    @app.post("/sessions/{session_id}/guess")
    def request_guess(session_id: str):
        lookup(session_id)
        return _update_body(service.request_guess(session_id))

    @app.post("/sessions/{session_id}/abandon")
    def abandon(session_id: str):
        lookup(session_id)
        return service.session_view(service.abandon_session(session_id))

    return app
