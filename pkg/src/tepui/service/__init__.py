"""HTTP front end.

POST /v1/<operation> with the operation's request body; responses are the
models from tepui.schemas.  Domain failures map to structured error bodies
carrying the same exit code the command line would use.
"""

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import schemas
from ..errors import TepuiError
from .handlers import HANDLERS

_STATUS = {"parse": 400, "domain": 422, "check": 409, "io": 500}

RESPONSE_MODELS = {
    "fiber": schemas.FiberResponse,
    "rankmap": schemas.RankMapResponse,
    "tensor": schemas.BundleResponse,
    "pullback": schemas.BundleResponse,
    "invisible": schemas.InvisibleResponse,
    "fibdet": schemas.FibdetResponse,
    "check": schemas.CheckResponse,
    "synthesize": schemas.SynthesizeResponse,
    "basechange": schemas.BaseChangeResponse,
    "jettensor": schemas.JetTensorResponse,
    "leaf": schemas.LeafResponse,
    "transport": schemas.TransportResponse,
    "fixtures": schemas.FixturesResponse,
}


def create_app() -> FastAPI:
    app = FastAPI(title="tepui", version="0.1.0")

    @app.exception_handler(TepuiError)
    async def _tepui_error(request, exc: TepuiError):
        return JSONResponse(
            status_code=_STATUS.get(exc.kind, 500),
            content={"error": exc.kind, "detail": str(exc), "exit_code": exc.exit_code},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    def register(name):
        handler = HANDLERS[name]
        request_model = schemas.REQUEST_MODELS[name]
        response_model = RESPONSE_MODELS[name]

        @app.post("/v1/" + name, response_model=response_model, name=name)
        def endpoint(req: request_model):  # type: ignore[valid-type]
            return handler(req)

    for op in HANDLERS:
        register(op)
    return app


app = create_app()

__all__ = ["app", "create_app", "HANDLERS", "RESPONSE_MODELS"]
