from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool

from app.shared.exceptions import OscailError, ResourceNotFoundException, ValidationException
from app.modules.metrics.schemas import EvalReport
from .schemas import EvaluateSavedRequest, ExperimentConfig, ExperimentResult
from .service import ExperimentService

router = APIRouter()
service = ExperimentService()


@router.post("/run", response_model=ExperimentResult)
async def run_experiment(config: ExperimentConfig):
    """
    Run a performance estimation or model selection experiment.

    The example set is read from `example_set_path` on the server; the
    experiment log is written to LOG_DIR and its path returned.
    """
    try:
        return await run_in_threadpool(service.run, config)
    except FileNotFoundError:
        raise ResourceNotFoundException(f"Example set {config.example_set_path}")
    except OscailError as e:
        raise ValidationException(str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/evaluate-saved", response_model=EvalReport)
async def evaluate_saved(request: EvaluateSavedRequest):
    """
    Classify a one-sided test set with a previously saved classifier.
    """
    try:
        return await run_in_threadpool(
            service.evaluate_saved, request.model_path, request.test_set_path, request.target_label
        )
    except FileNotFoundError as e:
        raise ResourceNotFoundException(f"File {e.filename}")
    except OscailError as e:
        raise ValidationException(str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
