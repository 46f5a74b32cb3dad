from app.schemas.instance import InstanceFile, load_instance, dump_instance, instance_to_json
from app.schemas.solver import SolverConfig
from app.schemas.certificate import Scheme, Method, ApproximationCertificate, parse_scheme_name, scheme_names
from app.schemas.law import ExactLaw, Conditioning
from app.schemas.report import InstanceSummary, RelaxationSummary, RunReport, SchemeRun, VerificationSummary

__all__ = [
    "InstanceFile",
    "load_instance",
    "dump_instance",
    "instance_to_json",
    "SolverConfig",
    "Scheme",
    "Method",
    "ApproximationCertificate",
    "parse_scheme_name",
    "scheme_names",
    "ExactLaw",
    "Conditioning",
    "InstanceSummary",
    "RelaxationSummary",
    "RunReport",
    "SchemeRun",
    "VerificationSummary"
]
