"""Command result schemas"""
from typing import List, Optional
from pydantic import BaseModel, Field

from msched.utils.exceptions import AppException


class CommandResult(BaseModel):
    """What a subcommand hands back to the entry point"""
    success: bool = True
    message: str = "Success"
    exit_code: int = 0
    output: List[str] = Field(default_factory=list)
    error: Optional[str] = None

    @classmethod
    def failure(cls, exc: AppException) -> "CommandResult":
        return cls(success=False, message="Failed", exit_code=exc.exit_code, error=exc.detail)
