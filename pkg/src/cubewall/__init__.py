"""cubewall: comparative visualisation of data-cube surveys on a simulated
display wall — a manager fans synchronized commands out to render nodes, and
every action lands in a replayable session log."""

__version__ = "0.1.0"
