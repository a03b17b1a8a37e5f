"""HTTP front end over the report builders; the CLI can act as its client."""

from fastapi import FastAPI

from .. import __version__
from ..reports import Report, invariants_report, random_report, surgery_report, validate_report
from .schemas import ComplexRequest, RandomRequest, ReportResponse, SurgeryRequest

app = FastAPI(title="hfgeo", version=__version__)


def _response(report: Report) -> ReportResponse:
    return ReportResponse(**report.to_dict())


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/validate", response_model=ReportResponse)
def validate(req: ComplexRequest):
    return _response(validate_report(req.text))


@app.post("/surgery", response_model=ReportResponse)
def surgery(req: SurgeryRequest):
    return _response(surgery_report(req.text, req.slope, req.framing, req.window, req.crosscheck))


@app.post("/invariants", response_model=ReportResponse)
def invariants(req: ComplexRequest):
    return _response(invariants_report(req.text))


@app.post("/random", response_model=ReportResponse)
def random_complex(req: RandomRequest):
    return _response(random_report(req.seed, req.kind, req.parts, req.deform))
