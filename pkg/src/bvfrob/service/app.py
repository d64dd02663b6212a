from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__, corpus
from ..descriptions import InputError
from ..pipeline import handle
from .schemas import AnalysisRequest, CorpusList, Health, StageReport

app = FastAPI(title="bvfrob", version=__version__)


def _document(req: AnalysisRequest) -> dict:
    if req.document is not None and req.instance is not None:
        raise HTTPException(status_code=400,
                            detail="give either document or instance, not both")
    if req.document is not None:
        return req.document
    if req.instance is not None:
        try:
            return corpus.load_doc(req.instance)
        except InputError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
    raise HTTPException(status_code=400,
                        detail="either document or instance is required")


def _run(stage: str, req: AnalysisRequest) -> dict:
    doc = _document(req)
    explicit = frozenset(req.model_fields_set
                         & {"seed", "tau_order", "hbar_order", "kmax"})
    try:
        report = handle(stage, doc, seed=req.seed, tau_order=req.tau_order,
                        hbar_order=req.hbar_order, kmax=req.kmax,
                        explicit=explicit)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return {"report": report}


@app.get("/health", response_model=Health)
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/v1/corpus", response_model=CorpusList)
def corpus_list() -> dict:
    return {"positive": list(corpus.POSITIVE),
            "negative": list(corpus.NEGATIVE)}


@app.get("/v1/corpus/{name}")
def corpus_document(name: str) -> dict:
    try:
        return corpus.load_doc(name)
    except InputError as exc:
        raise HTTPException(status_code=404, detail=str(exc))


@app.post("/v1/validate", response_model=StageReport)
def validate(req: AnalysisRequest) -> dict:
    return _run("validation", req)


@app.post("/v1/cohomology", response_model=StageReport)
def cohomology(req: AnalysisRequest) -> dict:
    return _run("cohomology", req)


@app.post("/v1/retract", response_model=StageReport)
def retract(req: AnalysisRequest) -> dict:
    return _run("retract", req)


@app.post("/v1/degeneration", response_model=StageReport)
def degeneration(req: AnalysisRequest) -> dict:
    return _run("degeneration", req)


@app.post("/v1/cyclic", response_model=StageReport)
def cyclic(req: AnalysisRequest) -> dict:
    return _run("cyclic", req)


@app.post("/v1/goodbasis", response_model=StageReport)
def goodbasis(req: AnalysisRequest) -> dict:
    return _run("goodbasis", req)


@app.post("/v1/qme", response_model=StageReport)
def qme(req: AnalysisRequest) -> dict:
    return _run("qme", req)


@app.post("/v1/frobenius", response_model=StageReport)
def frobenius(req: AnalysisRequest) -> dict:
    return _run("frobenius", req)


@app.post("/v1/pipeline", response_model=StageReport)
def pipeline(req: AnalysisRequest) -> dict:
    return _run("pipeline", req)
