#!/usr/bin/env python3
"""
Export Module - PDF and Excel export of the consolidated L2 error tables
"""

import os
from datetime import datetime
from typing import Optional

import pandas as pd

try:
    from reportlab.lib import colors
    from reportlab.lib.enums import TA_CENTER, TA_RIGHT
    from reportlab.lib.pagesizes import A4
    from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
    from reportlab.lib.units import inch
    from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle
    HAS_REPORTLAB = True
except ImportError:
    HAS_REPORTLAB = False

try:
    from openpyxl import Workbook
    from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
    from openpyxl.utils import get_column_letter
    HAS_OPENPYXL = True
except ImportError:
    HAS_OPENPYXL = False

from config import APP_NAME, BASE_DIR
from utils.constants import DIAGNOSTIC_TITLES, DIAGNOSTICS, REDUCED_VARIANTS, VARIANT_LABELS
from utils.logger import Logger


class ExportManager:
    """Exports the suite error table (see experiment.suite.error_table) to Excel and PDF"""

    def __init__(self):
        self.logger = Logger(__name__)
        self.timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        # #1f77d4 = RGB(31, 119, 212)
        self.PRIMARY_RGB = (31, 119, 212)
        self.PRIMARY_HEX_EXCEL = "1f77d4"
        self.SECONDARY_HEX_EXCEL = "f0f0f0"

    def _default_path(self, suffix: str) -> str:
        return os.path.join(str(BASE_DIR), "exports", f"L2_errors_{self.timestamp}.{suffix}")

    @staticmethod
    def _blocks(table: pd.DataFrame, diagnostic: str):
        """(lambda, F_y, rows) for one diagnostic; rows are (F_x, Red., Z.O.)."""
        labels = [VARIANT_LABELS[v] for v in REDUCED_VARIANTS]
        block = table.xs(diagnostic, level='diagnostic')
        for (lam, f_y), cells in block.groupby(level=['lambda', 'f_y']):
            rows = []
            for (_, _, f_x), values in cells[labels].iterrows():
                rows.append((f_x, *values.tolist()))
            yield lam, f_y, rows

    def export_tables_to_excel(self, table: pd.DataFrame, output_path: Optional[str] = None) -> str:
        """
        One worksheet per diagnostic, blocks by lambda and F_y

        Returns:
            Path to created Excel file
        """
        if not HAS_OPENPYXL:
            self.logger.error("openpyxl not installed. Install with: pip install openpyxl")
            raise ImportError("openpyxl is required for Excel export")

        try:
            wb = Workbook()
            wb.remove(wb.active)

            header_fill = PatternFill(start_color=self.PRIMARY_HEX_EXCEL, end_color=self.PRIMARY_HEX_EXCEL, fill_type="solid")
            block_fill = PatternFill(start_color=self.SECONDARY_HEX_EXCEL, end_color=self.SECONDARY_HEX_EXCEL, fill_type="solid")
            header_font = Font(bold=True, color="FFFFFF", size=12)
            border = Border(
                left=Side(style='thin'),
                right=Side(style='thin'),
                top=Side(style='thin'),
                bottom=Side(style='thin')
            )
            headers = ["F_x"] + [VARIANT_LABELS[v] for v in REDUCED_VARIANTS]

            for diagnostic in DIAGNOSTICS:
                if table.empty or diagnostic not in table.index.get_level_values('diagnostic'):
                    continue
                ws = wb.create_sheet(title=diagnostic.upper())
                ws.append([DIAGNOSTIC_TITLES[diagnostic]])
                ws['A1'].font = Font(bold=True, size=12)

                for lam, f_y, rows in self._blocks(table, diagnostic):
                    ws.append([])
                    ws.append([f"lambda = {lam:g}, F_y = {f_y:g}"])
                    ws.cell(row=ws.max_row, column=1).fill = block_fill
                    ws.append(headers)
                    for cell in ws[ws.max_row]:
                        cell.fill = header_fill
                        cell.font = header_font
                        cell.alignment = Alignment(horizontal="center", vertical="center")
                        cell.border = border
                    for f_x, reduced, zero_order in rows:
                        ws.append([f"{f_x:g}", reduced, zero_order])
                        for cell in ws[ws.max_row]:
                            cell.border = border
                            cell.number_format = '0.000E+00'

                for col in range(1, len(headers) + 1):
                    ws.column_dimensions[get_column_letter(col)].width = 16

            if not wb.sheetnames:
                wb.create_sheet(title="EMPTY").append(["No regime results"])

            if output_path is None:
                output_path = self._default_path("xlsx")
            os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)

            wb.save(output_path)
            self.logger.info(f"Error tables exported to Excel: {output_path}")
            return output_path

        except Exception as e:
            self.logger.error(f"Excel export failed: {e}")
            raise

    def export_tables_to_pdf(self, table: pd.DataFrame, output_path: Optional[str] = None) -> str:
        """
        Export the error tables to a PDF document

        Returns:
            Path to created PDF file
        """
        if not HAS_REPORTLAB:
            self.logger.error("reportlab not installed")
            raise ImportError("reportlab is required for PDF export")

        try:
            if output_path is None:
                output_path = self._default_path("pdf")
            os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)

            doc = SimpleDocTemplate(
                output_path,
                pagesize=A4,
                rightMargin=0.5*inch,
                leftMargin=0.5*inch,
                topMargin=0.75*inch,
                bottomMargin=0.75*inch
            )

            styles = getSampleStyleSheet()
            primary = colors.Color(*[c/255.0 for c in self.PRIMARY_RGB])
            title_style = ParagraphStyle(
                'CustomTitle',
                parent=styles['Heading1'],
                fontSize=18,
                textColor=primary,
                spaceAfter=20,
                alignment=TA_CENTER,
                fontName='Helvetica-Bold'
            )
            date_style = ParagraphStyle(
                'DateStyle',
                parent=styles['Normal'],
                fontSize=9,
                textColor=colors.grey,
                alignment=TA_RIGHT,
                spaceAfter=20
            )

            story = [
                Paragraph(f"{APP_NAME} - L2 error tables", title_style),
                Paragraph(f"Generated on {datetime.now().strftime('%d-%m-%Y %H:%M:%S')}", date_style),
            ]
            headers = ["F_x"] + [VARIANT_LABELS[v] for v in REDUCED_VARIANTS]

            for diagnostic in DIAGNOSTICS:
                if table.empty or diagnostic not in table.index.get_level_values('diagnostic'):
                    continue
                story.append(Paragraph(f"<b>{DIAGNOSTIC_TITLES[diagnostic]}</b>", styles['Heading3']))
                for lam, f_y, rows in self._blocks(table, diagnostic):
                    story.append(Paragraph(f"lambda = {lam:g}, F_y = {f_y:g}", styles['Normal']))
                    data = [headers] + [[f"{f_x:g}", f"{r:.4g}", f"{z:.4g}"] for f_x, r, z in rows]
                    grid = Table(data, colWidths=[1.2*inch, 1.5*inch, 1.5*inch])
                    grid.setStyle(TableStyle([
                        ('BACKGROUND', (0, 0), (-1, 0), primary),
                        ('TEXTCOLOR', (0, 0), (-1, 0), colors.white),
                        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
                        ('ALIGN', (0, 0), (-1, -1), 'CENTER'),
                        ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
                    ]))
                    story.append(grid)
                    story.append(Spacer(1, 0.15*inch))
                story.append(Spacer(1, 0.2*inch))

            if len(story) == 2:
                story.append(Paragraph("No regime results.", styles['Normal']))

            doc.build(story)
            self.logger.info(f"Error tables exported to PDF: {output_path}")
            return output_path

        except Exception as e:
            self.logger.error(f"PDF export failed: {e}")
            raise
