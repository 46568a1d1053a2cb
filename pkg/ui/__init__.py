from .streamlit_ui import StreamlitUI

__all__ = ['StreamlitUI'] 