from .plotdata import write_plotdata, write_table, read_table
