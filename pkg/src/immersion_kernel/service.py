"""HTTP front end over the command handlers.

Run with ``uvicorn immersion_kernel.service:app`` or ``immersion-kernel serve``.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__, api
from .errors import FamilyInvalidError, GraphInputError, PreconditionError, ResourceLimitError
from .schemas import BudgetRequest, ErrorBody, GenRequest, GenResponse, InstanceRequest, Report

app = FastAPI(title="immersion-kernel", version=__version__)

_STATUS = [
    (FamilyInvalidError, "family", 422),
    (GraphInputError, "parse", 400),
    (ResourceLimitError, "resource", 503),
    (PreconditionError, "precondition", 400),
]


def _error_handler(kind: str, code: int):
    async def handle(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=code, content=ErrorBody(kind=kind, message=str(exc)).model_dump())

    return handle


for _exc, _kind, _code in _STATUS:
    app.add_exception_handler(_exc, _error_handler(_kind, _code))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/solve", response_model=Report, response_model_by_alias=True)
def solve(req: BudgetRequest) -> Report:
    return api.solve(req)


@app.post("/approx", response_model=Report, response_model_by_alias=True)
def approx(req: InstanceRequest) -> Report:
    return api.approx(req)


@app.post("/kernel", response_model=Report, response_model_by_alias=True)
def kernel(req: BudgetRequest) -> Report:
    return api.kernel(req)


@app.post("/tctw", response_model=Report, response_model_by_alias=True)
def tctw(req: InstanceRequest) -> Report:
    return api.tctw(req)


@app.post("/free", response_model=Report, response_model_by_alias=True)
def free(req: InstanceRequest) -> Report:
    return api.free(req)


@app.post("/oracle", response_model=Report, response_model_by_alias=True)
def oracle(req: InstanceRequest) -> Report:
    return api.oracle(req)


@app.post("/gen", response_model=GenResponse)
def gen(req: GenRequest) -> GenResponse:
    return api.gen(req)
