import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from dbx.seqcore import EpSeq  # noqa: E402

words = st.text(alphabet="01", max_size=6)
nonempty_words = st.text(alphabet="01", min_size=1, max_size=6)


@st.composite
def epseqs(draw, max_pre=6, max_per=6):
    pre = draw(st.text(alphabet="01", max_size=max_pre))
    per = draw(st.text(alphabet="01", min_size=1, max_size=max_per))
    return EpSeq(pre, per)


ACCEPTANCE_LINES: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
