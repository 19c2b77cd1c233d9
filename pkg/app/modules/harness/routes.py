from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool

from app.core.config import settings
from app.shared.exceptions import OscailError, ResourceNotFoundException, ValidationException
from .schemas import TrendStudyConfig, TrendTable
from .service import TrendStudyService

router = APIRouter()
service = TrendStudyService()


@router.post("/run", response_model=TrendTable)
async def run_trend_study(config: TrendStudyConfig):
    """
    Run an unexpected-outlier trend study.

    CSV exports and the replay manifest are written to DATA_DIR.
    """
    try:
        return await run_in_threadpool(service.run, config, settings.DATA_DIR)
    except FileNotFoundError as e:
        raise ResourceNotFoundException(f"File {e.filename}")
    except OscailError as e:
        raise ValidationException(str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
