import nox

PYTHONS = ["3.11", "3.12", "3.13", "3.14"]


@nox.session(python=PYTHONS)
def tests(session):
    session.install(".", "pytest", "pytest-cov", "hypothesis")
    session.run("pytest", "tests", "-m", "not slow")


@nox.session(python=PYTHONS[-2])
def acceptance(session):
    session.install(".", "pytest", "pytest-cov", "hypothesis")
    session.run("pytest", "tests", "-m", "slow")
