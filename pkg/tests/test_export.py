import pytest

from experiment.suite import error_table
from tests.test_suite import _published_summaries
from utils.export import ExportManager


@pytest.fixture
def table():
    return error_table(_published_summaries())


def test_excel_export_has_one_sheet_per_diagnostic(table, tmp_path):
    openpyxl = pytest.importorskip("openpyxl")
    path = ExportManager().export_tables_to_excel(table, str(tmp_path / "errors.xlsx"))
    wb = openpyxl.load_workbook(path)
    assert wb.sheetnames == ["PDF", "ACF", "CCF", "KCF"]
    values = [row for row in wb["ACF"].iter_rows(values_only=True)]
    assert ("lambda = 0.3, F_y = 8",) == tuple(v for v in values[2] if v is not None)
    assert values[3] == ("F_x", "Red.", "Z.O.")
    assert values[4][0] == "6"
    assert values[4][1] == pytest.approx(5.841e-2)


def test_excel_export_of_empty_table(tmp_path):
    openpyxl = pytest.importorskip("openpyxl")
    path = ExportManager().export_tables_to_excel(error_table([]), str(tmp_path / "empty.xlsx"))
    assert openpyxl.load_workbook(path).sheetnames == ["EMPTY"]


def test_pdf_export(table, tmp_path):
    pytest.importorskip("reportlab")
    path = ExportManager().export_tables_to_pdf(table, str(tmp_path / "nested" / "errors.pdf"))
    with open(path, 'rb') as f:
        assert f.read(5) == b"%PDF-"
