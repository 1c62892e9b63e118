"""Hypothesis strategies for frameworks and cross-impact matrices."""

from hypothesis import strategies as st

from timecib.core import CrossImpactMatrix, Framework

sizes = st.lists(st.integers(1, 3), min_size=2, max_size=4)


@st.composite
def cims(draw, size_lists=sizes, r=3):
    s = draw(size_lists)
    fw = Framework.from_sizes(s)
    cells = {}
    for i in range(1, len(s) + 1):
        for j in range(1, len(s) + 1):
            if i != j and draw(st.booleans()):
                cells[(i, j)] = draw(
                    st.lists(
                        st.lists(st.integers(-r, r), min_size=s[j - 1], max_size=s[j - 1]),
                        min_size=s[i - 1],
                        max_size=s[i - 1],
                    )
                )
    return CrossImpactMatrix(fw, cells, r)
