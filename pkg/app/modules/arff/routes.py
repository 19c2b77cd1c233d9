from fastapi import APIRouter, File, Form, HTTPException, UploadFile
from fastapi.responses import PlainTextResponse

from app.shared.exceptions import OscailError, ValidationException
from .service import parse_arff, relabel, write_arff

router = APIRouter()


@router.post("/relabel", response_class=PlainTextResponse)
async def relabel_example_set(file: UploadFile = File(...), target: str = Form(...)):
    """
    Relabel an uploaded ARFF example set for one-sided classification.

    Rows of class `target` become Target, all others become Other. The
    returned ARFF text carries the relabelling banner.
    """
    try:
        source = (await file.read()).decode("utf-8")
        example_set, provenance = relabel(parse_arff(source), target)
        return PlainTextResponse(write_arff(example_set, provenance))
    except UnicodeDecodeError:
        raise ValidationException("ARFF upload must be UTF-8 text")
    except OscailError as e:
        raise ValidationException(str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
