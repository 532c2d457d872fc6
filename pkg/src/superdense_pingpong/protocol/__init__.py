# Session engine lives in .session; importing it here would cycle through adversary.
from .auth import authenticate, verify_tag, make_authenticator
from .messages import PublicMessage, message_source_from_spec
from .records import RunRecord, SessionResult, summarize
